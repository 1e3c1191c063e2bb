"""Figure rendering for the CLI report paths.

Every renderer takes an in-memory result and writes a PNG next to the
corresponding CSV.  matplotlib is imported lazily with the Agg backend so
library users who never plot pay nothing.
"""

import numpy as np

TERMINAL_COLORS = {
    "PureCC": "tab:blue",
    "PureDD": "tab:red",
    "Interior": "tab:green",
    "Unconverged": "tab:grey",
}


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def plot_trajectory(rec, path: str):
    """Strategy components (solid) and stationary rates (dashed) over time."""
    plt = _pyplot()
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    labels = ("x_C", "x_D", "y_C", "y_D")
    colors = ("tab:blue", "tab:green", "tab:red", "tab:purple")
    for k in range(4):
        ax1.plot(rec.times, rec.states[:, k], color=colors[k], label=labels[k])
    ax1.set_ylabel("cooperation probability")
    ax1.set_ylim(-0.02, 1.02)
    ax1.legend(loc="best", fontsize=8,
               title=f"{rec.terminal} / {rec.case_label}", title_fontsize=8)
    ax2.plot(rec.times, rec.eq_track[:, 0], "--", color="tab:blue", label="x_e")
    ax2.plot(rec.times, rec.eq_track[:, 1], "--", color="tab:red", label="y_e")
    ax2.set_xlabel("t")
    ax2.set_ylabel("stationary cooperation rate")
    ax2.set_ylim(-0.02, 1.02)
    ax2.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_sweep(res, path: str):
    """Exploitation and mean-cooperation heatmaps over the swept plane."""
    plt = _pyplot()
    n1, n2 = res.axis1.n, res.axis2.n
    extent = (res.axis2.lo, res.axis2.hi, res.axis1.lo, res.axis1.hi)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.6))
    expl = res.exploitation.reshape(n1, n2)
    lim = np.nanmax(np.abs(expl)) if np.isfinite(expl).any() else 1.0
    lim = max(lim, 1e-9)
    im1 = ax1.imshow(expl, origin="lower", aspect="auto", cmap="coolwarm",
                     vmin=-lim, vmax=lim, extent=extent)
    fig.colorbar(im1, ax=ax1, label="exploitation  y_e* - x_e*")
    im2 = ax2.imshow(res.cooperation.reshape(n1, n2), origin="lower",
                     aspect="auto", cmap="viridis", vmin=0.0, vmax=1.0,
                     extent=extent)
    fig.colorbar(im2, ax=ax2, label="mean cooperation rate")
    for ax in (ax1, ax2):
        ax.set_xlabel(res.axis2.name)
        ax.set_ylabel(res.axis1.name)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_terminal_scatter(res, path: str):
    """Scatter of terminal stationary rates, one color per terminal kind."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.5, 5))
    terms = np.array(res.terminal)
    for term, color in TERMINAL_COLORS.items():
        mask = terms == term
        if not mask.any():
            continue
        if term == "Unconverged":
            ax.scatter([], [], s=14, color=color, label=f"{term} ({mask.sum()})")
            continue
        ax.scatter(res.x_e_star[mask], res.y_e_star[mask], s=14, alpha=0.7,
                   color=color, label=term)
    ax.plot([0, 1], [0, 1], color="grey", lw=0.8, ls=":")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlabel("x_e*")
    ax.set_ylabel("y_e*")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_stability(smap, path: str):
    """Categorical map of the (x_e, y_e) grid: infeasible / unstable / stable."""
    plt = _pyplot()
    from matplotlib.colors import ListedColormap
    codes = np.zeros((smap.n, smap.n), dtype=int)
    for i in range(smap.n):
        for j in range(smap.n):
            if smap.status[i][j] != "ok":
                codes[i, j] = 0
            elif not smap.stable[i, j]:
                codes[i, j] = 1
            elif smap.oscillatory[i, j]:
                codes[i, j] = 3
            else:
                codes[i, j] = 2
    cmap = ListedColormap(["#e8e8e8", "#d9b38c", "#4c9f70", "#2b6cb0"])
    fig, ax = plt.subplots(figsize=(5.8, 5))
    # codes is indexed [i, j] = (x_e, y_e); transpose so x_e runs horizontally
    ax.imshow(codes.T, origin="lower", cmap=cmap, vmin=0, vmax=3,
              extent=(0, 1, 0, 1), aspect="equal")
    ax.set_xlabel("x_e")
    ax.set_ylabel("y_e")
    handles = [plt.Rectangle((0, 0), 1, 1, color=c) for c in cmap.colors]
    ax.legend(handles,
              ["infeasible", "unstable", "stable (monotone)",
               "stable (oscillatory)"],
              loc="upper left", fontsize=7, framealpha=0.9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
