"""Fixed-point structure of the learning dynamics.

Besides the pure cooperate/defect corners, the dynamics admit a
two-parameter family of interior rest points: for target stationary rates
(x_e, y_e) there is exactly one strategy pair that both pins those rates
and zeroes both players' cooperate-defect payoff gaps.  This module builds
those points, linearizes the field around them, and classifies their
transverse stability.
"""

from dataclasses import dataclass

import numpy as np

from .dynamics import (
    UNIT_SPEEDS,
    IntegratorConfig,
    LearningSpeeds,
    field_at,
    sweep_cell,
)
from .errors import (
    AmbiguousZeroSplit,
    NotSubmodular,
    OutOfStrategyBox,
    ValidationError,
)
from .game import JointStrategy, PayoffMatrix, equilibrium

#: Components may overshoot [0, 1] by this much before a zero-gap pair is
#: declared infeasible; anything closer is snapped onto the face.
FEASIBILITY_TOL = 1e-12


def pure_dd_stable(pay: PayoffMatrix, x_c: float, y_c: float) -> bool:
    """Whether mutual defection resists invasion by conditional cooperation.

    The defection corner plane is attracting iff both players' cooperate-
    after-cooperation probabilities sit at or below (p - s)/(t - p).
    """
    thr = (pay.p - pay.s) / (pay.t - pay.p)
    return x_c <= thr and y_c <= thr


def pure_cc_stable(pay: PayoffMatrix, x_d: float, y_d: float) -> bool:
    """Whether mutual cooperation resists drift toward defection.

    Attracting iff both cooperate-after-defection probabilities sit at or
    below 1 - (t - r)/(r - s).
    """
    thr = 1.0 - (pay.t - pay.r) / (pay.r - pay.s)
    return x_d <= thr and y_d <= thr


def manifold_point(pay: PayoffMatrix, x_e: float, y_e: float) -> JointStrategy:
    """The unique zero-gap strategy pair with stationary rates (x_e, y_e).

    Both payoff gaps vanish there, so the pair is a rest point of the
    dynamics for every choice of learning speeds.  Raises OutOfStrategyBox
    when the required pair needs a probability outside [0, 1] (the rates
    are then not jointly enforceable).
    """
    if not (0.0 < x_e < 1.0 and 0.0 < y_e < 1.0):
        raise ValidationError(
            f"stationary rates ({x_e}, {y_e}) must lie strictly inside (0, 1)")
    t, r, p, s = pay.t, pay.r, pay.p, pay.s
    q_x = (x_e * (t - r) + (1.0 - x_e) * (p - s)) \
        / (y_e * (r - s) + (1.0 - y_e) * (t - p))
    q_y = (y_e * (t - r) + (1.0 - y_e) * (p - s)) \
        / (x_e * (r - s) + (1.0 - x_e) * (t - p))
    comps = {
        "x_c": x_e + (1.0 - y_e) * q_x,
        "x_d": x_e - y_e * q_x,
        "y_c": y_e + (1.0 - x_e) * q_y,
        "y_d": y_e - x_e * q_y,
    }
    clipped = {}
    for name, v in comps.items():
        if v < -FEASIBILITY_TOL or v > 1.0 + FEASIBILITY_TOL:
            raise OutOfStrategyBox(
                f"zero-gap pair at (x_e={x_e}, y_e={y_e}) needs {name}={v}")
        clipped[name] = min(1.0, max(0.0, v))
    return JointStrategy(**clipped)


def jacobian(pay: PayoffMatrix, strat: JointStrategy,
             speeds: LearningSpeeds = UNIT_SPEEDS, h: float = 1e-6) -> np.ndarray:
    """Central finite-difference linearization of the field at strat.

    Stencil points may poke slightly outside the unit box; the field's
    rational expressions extend smoothly there, which keeps the stencil
    honest at rest points sitting on a face.
    """
    x0 = strat.as_array()
    jac = np.empty((4, 4))
    for j in range(4):
        xp = x0.copy()
        xm = x0.copy()
        xp[j] += h
        xm[j] -= h
        fp = field_at(pay, xp[0], xp[1], xp[2], xp[3], speeds)
        fm = field_at(pay, xm[0], xm[1], xm[2], xm[3], speeds)
        jac[:, j] = (np.array(fp) - np.array(fm)) / (2.0 * h)
    return jac


def eigenvalues_4x4(m) -> np.ndarray:
    """Eigenvalues of a real 4x4 matrix, sorted by descending real part.

    Ties broken by descending imaginary part so conjugate pairs appear in
    a fixed order.
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (4, 4):
        raise ValidationError(f"expected a 4x4 matrix, got shape {m.shape}")
    eig = np.linalg.eigvals(m)
    order = np.lexsort((-eig.imag, -eig.real))
    return eig[order]


@dataclass(frozen=True, eq=False)
class StabilityReport:
    """Linearization summary at one rest point.

    Two eigenvalues are expected to vanish (motion along the rest-point
    family is neutral); `stable` and `oscillatory` describe the remaining
    transverse pair.
    """

    location: JointStrategy
    x_e: float
    y_e: float
    kind: str
    eigenvalues: np.ndarray
    n_zero: int
    stable: bool
    oscillatory: bool


def classify_interior(pay: PayoffMatrix, x_e: float, y_e: float,
                      speeds: LearningSpeeds = UNIT_SPEEDS,
                      h: float = 1e-6, zero_tol: float = 1e-5,
                      gap_min: float = 10.0) -> StabilityReport:
    """Transverse stability of the interior rest point at (x_e, y_e).

    Eigenvalues below zero_tol * max|eigenvalue| count as the neutral pair;
    exactly two must qualify and the third-smallest magnitude must exceed
    the second-smallest by gap_min, otherwise the split is reported as
    ambiguous rather than guessed.
    """
    loc = manifold_point(pay, x_e, y_e)
    jac = jacobian(pay, loc, speeds, h)
    eig = eigenvalues_4x4(jac)
    mags = np.sort(np.abs(eig))
    scale = mags[-1]
    if scale == 0.0:
        raise AmbiguousZeroSplit("linearization vanished identically")
    n_zero = int(np.count_nonzero(np.abs(eig) < zero_tol * scale))
    if n_zero != 2:
        raise AmbiguousZeroSplit(
            f"expected 2 near-zero eigenvalues, found {n_zero} (spectrum {eig})")
    if mags[1] > 0.0 and mags[2] / mags[1] < gap_min:
        raise AmbiguousZeroSplit(
            f"neutral/transverse magnitude gap only {mags[2] / mags[1]:.2f} "
            f"(spectrum {eig})")
    by_mag = np.argsort(np.abs(eig))
    transverse = eig[by_mag[2:]]
    stable = bool(np.all(transverse.real < 0.0))
    oscillatory = bool(np.any(transverse.imag != 0.0))
    return StabilityReport(location=loc, x_e=x_e, y_e=y_e, kind="Interior",
                           eigenvalues=eig, n_zero=n_zero, stable=stable,
                           oscillatory=oscillatory)


def boundary_curve_value(pay: PayoffMatrix, name: str, coord: float):
    """Solve one feasibility locus for the other stationary rate.

    For the x-player loci ("x_C=1", "x_D=0") `coord` is x_e and the return
    value is y_e; for the y-player loci the roles are swapped.  Returns
    None where the locus has no solution (vanishing denominator).
    """
    t, r, p, s = pay.t, pay.r, pay.p, pay.s
    k = t - r - p + s
    if name in ("x_D=0", "y_D=0"):
        den = 2.0 * k * coord + (p - s)
        if abs(den) < 1e-12:
            return None
        return (t - p) * coord / den
    if name in ("x_C=1", "y_C=1"):
        den = (t - r - 2.0 * p + 2.0 * s) - 2.0 * k * coord
        if abs(den) < 1e-12:
            return None
        return ((t - 2.0 * p + s) - (2.0 * t - r - 2.0 * p + s) * coord) / den
    raise ValidationError(f"unknown boundary locus {name!r}")


def exploitation_boundaries(pay: PayoffMatrix, resolution: int) -> dict:
    """Sampled loci where the zero-gap pair hits a face of the strategy box.

    Inside the region they enclose, exploitative rest points are feasible.
    Returns {"x_C=1": pts, "x_D=0": pts, "y_C=1": pts, "y_D=0": pts} with
    pts an (m, 2) array of (x_e, y_e) samples inside the open unit square.
    Only meaningful for submodular payoffs (otherwise no interior rest
    point is transversally stable and there is nothing to delimit).
    """
    if not pay.submodular:
        raise NotSubmodular(
            "exploitation boundaries require t - r - p + s > 0")
    if resolution < 2:
        raise ValidationError(f"resolution={resolution} must be at least 2")
    grid = (2.0 * np.arange(1, resolution + 1) - 1.0) / (2.0 * resolution)
    out = {}
    for name in ("x_C=1", "x_D=0", "y_C=1", "y_D=0"):
        pts = []
        for c in grid:
            v = boundary_curve_value(pay, name, c)
            if v is None or not (0.0 < v < 1.0):
                continue
            xe, ye = (c, v) if name.startswith("x") else (v, c)
            # each locus extends past the region's corners into rates the
            # OTHER components cannot realize; keep only the bounding arc
            try:
                manifold_point(pay, xe, ye)
            except OutOfStrategyBox:
                continue
            pts.append((xe, ye))
        out[name] = np.array(pts).reshape(-1, 2)
    return out


def most_exploitative(pay: PayoffMatrix):
    """Stationary rates and payoffs of the extreme exploitation rest point.

    The feasible-and-stable family is widest at this corner of the
    feasibility region: player 1 cooperates as little, and is rewarded as
    much, as any stable rest point allows.  Returns (x_e, y_e, u_e, v_e).
    Raises NotSubmodular when t - r - p + s <= 0 (no stable interior rest
    points exist there at all).
    """
    if not pay.submodular:
        raise NotSubmodular(
            "most exploitative rest point requires t - r - p + s > 0")
    t, r, p, s = pay.t, pay.r, pay.p, pay.s
    x_e = (p - s) / ((r - s) + (p - s))
    y_e = (t - p) / ((t - r) + (t - p))
    strat = manifold_point(pay, x_e, y_e)
    eq = equilibrium(pay, strat)
    return (x_e, y_e, eq.u_e, eq.v_e)


def dynamic_stability_probe(pay: PayoffMatrix, x_e: float, y_e: float,
                            speeds: LearningSpeeds = UNIT_SPEEDS,
                            eps: float = 1e-3, radius: float = 0.1,
                            config: IntegratorConfig = None) -> bool:
    """Cross-check of classify_interior by perturbing and integrating.

    Kicks the rest point by eps along each strategy axis (inward where the
    component sits on a face) and integrates; the point passes if every
    kicked trajectory converges with stationary rates within `radius` of
    (x_e, y_e).  Slower but independent of the linearization, so tests use
    it to spot-check the eigenvalue route.
    """
    if config is None:
        config = IntegratorConfig(dt=0.01, t_max=5e3, converge_tol=1e-10,
                                  sample_interval=1.0)
    loc = manifold_point(pay, x_e, y_e)
    base = loc.as_array()
    for j in range(4):
        kicked = base.copy()
        kicked[j] += eps if kicked[j] + eps <= 1.0 else -eps
        init = JointStrategy(*kicked)
        terminal, xe, ye = sweep_cell(pay, init, speeds, config)[:3]
        if terminal == "Unconverged":
            return False
        if np.hypot(xe - x_e, ye - y_e) > radius:
            return False
    return True
