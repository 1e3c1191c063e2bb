"""Delimited output, run manifests, and standalone plot-script emission.

Floats are written with %.17g so parsing a CSV back recovers every value
bit for bit; reruns of the same parameters therefore produce byte-identical
files.  A RunManifest JSON describing the producing command is written next
to every data file, and `ipd-learn --manifest <file>` replays it.
"""

import json
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from ._version import __version__
from .errors import UnknownPlotKind, ValidationError

TRAJECTORY_HEADER = "t,x_C,x_D,y_C,y_D,x_e,y_e,u_e,v_e"
SWEEP_HEADER = ("axis1,axis2,terminal,x_e_star,y_e_star,u_e_star,v_e_star,"
                "exploitation,cooperation,case_label")
GRID4D_HEADER = ("x_C0,x_D0,y_C0,y_D0,terminal,x_e_star,y_e_star,u_e_star,"
                 "v_e_star,exploitation,cooperation,case_label")
STABILITY_HEADER = "x_e,y_e,status,stable,oscillatory,n_zero,max_real"

PLOT_KINDS = ("trajectory", "basin", "scatter")


def _fmt(v) -> str:
    return "%.17g" % v


def manifest_path_for(data_path: str) -> str:
    root, _ = os.path.splitext(data_path)
    return root + ".manifest.json"


@dataclass
class RunManifest:
    """Everything needed to reproduce one CLI run.

    params must stay JSON-primitive so a round trip through disk recovers
    them exactly (Python serializes floats at full precision).
    """

    command: str
    params: dict
    version: str = __version__
    created: str = ""
    outputs: list = field(default_factory=list)

    def __post_init__(self):
        if not self.created:
            self.created = datetime.now(timezone.utc).isoformat()

    def write(self, path: str):
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def read(cls, path: str) -> "RunManifest":
        with open(path) as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(
                    f"malformed manifest {path}: {exc}") from exc
        try:
            return cls(command=raw["command"], params=raw["params"],
                       version=raw.get("version", ""),
                       created=raw.get("created", ""),
                       outputs=raw.get("outputs", []))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed manifest {path}: {exc}") from exc


def _write_manifest(manifest, data_path):
    if manifest is not None:
        manifest.write(manifest_path_for(data_path))


def write_trajectory_csv(rec, path: str, manifest: RunManifest = None):
    """One row per sampled time; %.17g everywhere."""
    with open(path, "w") as fh:
        fh.write(TRAJECTORY_HEADER + "\n")
        for i in range(rec.times.shape[0]):
            row = [rec.times[i]] + list(rec.states[i]) + list(rec.eq_track[i])
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    _write_manifest(manifest, path)


def read_trajectory_csv(path: str):
    """Returns (times, states, eq_track); exact inverse of the writer."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header != TRAJECTORY_HEADER:
            raise ValidationError(f"unexpected trajectory header {header!r}")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    data = np.array([[float(v) for v in row] for row in rows]).reshape(-1, 9)
    return data[:, 0], data[:, 1:5], data[:, 5:9]


def _write_summary_rows(fh, lead_columns, res):
    for i in range(res.init.shape[0]):
        row = ([_fmt(v) for v in lead_columns(i)]
               + [res.terminal[i]]
               + [_fmt(v) for v in (res.x_e_star[i], res.y_e_star[i],
                                    res.u_e_star[i], res.v_e_star[i],
                                    res.exploitation[i], res.cooperation[i])]
               + [res.case_label[i]])
        fh.write(",".join(row) + "\n")


def write_sweep_csv(res, path: str, manifest: RunManifest = None):
    """Row-major cells of a 2-d sweep (axis1 outer), one row per cell."""
    from .sweep import STRATEGY_COMPONENTS
    idx = {name: k for k, name in enumerate(STRATEGY_COMPONENTS)}
    i1, i2 = idx[res.axis1.name], idx[res.axis2.name]
    with open(path, "w") as fh:
        fh.write(SWEEP_HEADER + "\n")
        _write_summary_rows(fh, lambda i: (res.init[i, i1], res.init[i, i2]), res)
    _write_manifest(manifest, path)


def write_grid4d_csv(res, path: str, manifest: RunManifest = None):
    """Rows follow the lattice's lexicographic order."""
    with open(path, "w") as fh:
        fh.write(GRID4D_HEADER + "\n")
        _write_summary_rows(fh, lambda i: tuple(res.init[i]), res)
    _write_manifest(manifest, path)


def _read_summary_csv(path, header, n_lead):
    with open(path) as fh:
        got = fh.readline().strip()
        if got != header:
            raise ValidationError(f"unexpected header {got!r} in {path}")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    lead = np.array([[float(v) for v in row[:n_lead]] for row in rows])
    lead = lead.reshape(-1, n_lead)
    terminal = [row[n_lead] for row in rows]
    stars = np.array([[float(v) for v in row[n_lead + 1:n_lead + 7]]
                      for row in rows]).reshape(-1, 6)
    case = [row[n_lead + 7] for row in rows]
    return lead, terminal, stars, case


def read_sweep_csv(path: str):
    """Returns (axis_values (m,2), terminal, star_columns (m,6), case_label)."""
    return _read_summary_csv(path, SWEEP_HEADER, 2)


def read_grid4d_csv(path: str):
    """Returns (inits (m,4), terminal, star_columns (m,6), case_label)."""
    return _read_summary_csv(path, GRID4D_HEADER, 4)


def write_stability_csv(smap, path: str, manifest: RunManifest = None):
    """Row-major over (x_e index, y_e index); booleans as 0/1."""
    with open(path, "w") as fh:
        fh.write(STABILITY_HEADER + "\n")
        for i in range(smap.n):
            for j in range(smap.n):
                fh.write(",".join([
                    _fmt(smap.x_e[i]), _fmt(smap.y_e[j]), smap.status[i][j],
                    str(int(smap.stable[i, j])),
                    str(int(smap.oscillatory[i, j])),
                    str(int(smap.n_zero[i, j])), _fmt(smap.max_real[i, j]),
                ]) + "\n")
    _write_manifest(manifest, path)


def write_monotonicity_json(report, path: str, manifest: RunManifest = None):
    payload = {
        "payoff": list(report.payoff.as_tuple()),
        "opponent": list(report.opponent),
        "seed": report.seed,
        "perturbation": report.perturbation,
        "n_samples": report.n_samples,
        "n_attempts": report.n_attempts,
        "n_violations": report.n_violations,
        "violations": [list(v) for v in report.violations],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(manifest, path)


_SCRIPT_COMMON = '''\
#!/usr/bin/env python3
"""Auto-generated plotting script; expects {csv_name!r} next to it."""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))
CSV = os.path.join(HERE, {csv_name!r})
OUT = os.path.join(HERE, {png_name!r})
'''

_SCRIPT_BODIES = {
    "trajectory": '''
data = np.genfromtxt(CSV, delimiter=",", names=True)
fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
for col, color in (("x_C", "tab:blue"), ("x_D", "tab:green"),
                   ("y_C", "tab:red"), ("y_D", "tab:purple")):
    ax1.plot(data["t"], data[col], color=color, label=col)
ax1.set_ylabel("cooperation probability")
ax1.set_ylim(-0.02, 1.02)
ax1.legend(loc="best", fontsize=8)
ax2.plot(data["t"], data["x_e"], "--", color="tab:blue", label="x_e")
ax2.plot(data["t"], data["y_e"], "--", color="tab:red", label="y_e")
ax2.set_xlabel("t")
ax2.set_ylabel("stationary cooperation rate")
ax2.set_ylim(-0.02, 1.02)
ax2.legend(loc="best", fontsize=8)
fig.tight_layout()
fig.savefig(OUT, dpi=150)
print(OUT)
''',
    "basin": '''
lead = np.genfromtxt(CSV, delimiter=",", skip_header=1, usecols=(0, 1))
expl = np.genfromtxt(CSV, delimiter=",", skip_header=1, usecols=(7,))
a1 = np.unique(lead[:, 0])
a2 = np.unique(lead[:, 1])
grid = expl.reshape(a1.size, a2.size)
with open(CSV) as fh:
    names = fh.readline().strip().split(",")[:2]
fig, ax = plt.subplots(figsize=(6, 5))
im = ax.imshow(grid, origin="lower", aspect="auto", cmap="coolwarm",
               extent=(a2[0], a2[-1], a1[0], a1[-1]))
ax.set_xlabel(names[1])
ax.set_ylabel(names[0])
fig.colorbar(im, ax=ax, label="exploitation  y_e* - x_e*")
fig.tight_layout()
fig.savefig(OUT, dpi=150)
print(OUT)
''',
    "scatter": '''
rows = [line.strip().split(",") for line in open(CSV) if line.strip()]
names = rows[0]
ix, iy = names.index("x_e_star"), names.index("y_e_star")
it = names.index("terminal")
pts = {}
for row in rows[1:]:
    try:
        x, y = float(row[ix]), float(row[iy])
    except ValueError:
        continue
    if np.isnan(x) or np.isnan(y):
        continue
    pts.setdefault(row[it], []).append((x, y))
fig, ax = plt.subplots(figsize=(5.5, 5))
for term, xy in sorted(pts.items()):
    xy = np.array(xy)
    ax.scatter(xy[:, 0], xy[:, 1], s=14, alpha=0.7, label=term)
ax.plot([0, 1], [0, 1], color="grey", lw=0.8, ls=":")
ax.set_xlim(-0.02, 1.02)
ax.set_ylim(-0.02, 1.02)
ax.set_xlabel("x_e*")
ax.set_ylabel("y_e*")
ax.legend(loc="best", fontsize=8)
fig.tight_layout()
fig.savefig(OUT, dpi=150)
print(OUT)
''',
}


def emit_plot_script(csv_path: str, kind: str, script_path: str):
    """Write a self-contained matplotlib script for an already-written CSV.

    The script resolves the CSV by basename relative to its own location
    and saves a PNG named after itself.  kind is one of PLOT_KINDS.
    """
    if kind not in PLOT_KINDS:
        raise UnknownPlotKind(
            f"plot kind {kind!r} not supported; choose from {PLOT_KINDS}")
    csv_name = os.path.basename(csv_path)
    png_name = os.path.splitext(os.path.basename(script_path))[0] + ".png"
    text = _SCRIPT_COMMON.format(csv_name=csv_name, png_name=png_name) \
        + _SCRIPT_BODIES[kind]
    with open(script_path, "w") as fh:
        fh.write(text)
