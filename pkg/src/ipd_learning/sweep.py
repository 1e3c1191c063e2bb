"""Grid studies: basins of attraction, stability maps, and robustness checks.

Cells are always laid out row-major over the loop indices so CSV rows,
result arrays, and replays line up exactly.  Workers write into
preallocated slots by cell index, which keeps results identical for any
thread count.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    DEFAULT_CONFIG,
    DOMINANCE_BAND,
    UNIT_SPEEDS,
    IntegratorConfig,
    LearningSpeeds,
    sweep_cell,
)
from .errors import (
    AmbiguousZeroSplit,
    DegenerateEncountered,
    NoConvergence,
    OutOfStrategyBox,
    ValidationError,
)
from .fixed_points import classify_interior
from .game import JointStrategy, PayoffMatrix

#: Axis names accepted by sweeps, in strategy-component order.
STRATEGY_COMPONENTS = ("x_C", "x_D", "y_C", "y_D")


def uniform_grid_4d(n: int) -> np.ndarray:
    """Midpoint lattice over strategy space: ((2i-1)/2n, ...) per axis.

    Returns shape (n**4, 4) in lexicographic order of the axis indices
    (x_c slowest, y_d fastest).  Midpoints keep every start interior.
    """
    if n < 1:
        raise ValidationError(f"grid resolution n={n} must be at least 1")
    mids = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
    mesh = np.meshgrid(mids, mids, mids, mids, indexing="ij")
    return np.stack(mesh, axis=-1).reshape(-1, 4)


@dataclass(frozen=True)
class GridAxis:
    """One swept strategy component with an inclusive-endpoint range."""

    name: str
    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if self.name not in STRATEGY_COMPONENTS:
            raise ValidationError(
                f"axis name {self.name!r} not one of {STRATEGY_COMPONENTS}")
        if not (0.0 <= self.lo <= self.hi <= 1.0):
            raise ValidationError(
                f"axis range [{self.lo}, {self.hi}] must be ordered within [0, 1]")
        if self.n < 1 or (self.n == 1 and self.lo != self.hi):
            raise ValidationError(f"axis needs n>=2 points for a proper range")

    def values(self) -> np.ndarray:
        if self.n == 1:
            return np.array([self.lo])
        return np.linspace(self.lo, self.hi, self.n)


@dataclass(eq=False)
class SweepResult:
    """Per-cell terminal summaries over a 2-d initial-condition sweep.

    Arrays are row-major: axis1 is the outer loop.  exploitation is
    y_e* - x_e* (positive when player 1 ends up the exploiter) and
    cooperation is the mean stationary cooperation rate; both are NaN for
    unconverged cells.
    """

    axis1: GridAxis
    axis2: GridAxis
    fixed: dict
    payoff: PayoffMatrix
    speeds: LearningSpeeds
    config: IntegratorConfig
    init: np.ndarray
    terminal: list
    x_e_star: np.ndarray
    y_e_star: np.ndarray
    u_e_star: np.ndarray
    v_e_star: np.ndarray
    exploitation: np.ndarray
    cooperation: np.ndarray
    case_label: list

    @property
    def n_cells(self) -> int:
        return self.init.shape[0]


@dataclass(eq=False)
class Grid4DResult:
    """Terminal summaries for every start of a 4-d midpoint lattice."""

    n: int
    payoff: PayoffMatrix
    speeds: LearningSpeeds
    config: IntegratorConfig
    init: np.ndarray
    terminal: list
    x_e_star: np.ndarray
    y_e_star: np.ndarray
    u_e_star: np.ndarray
    v_e_star: np.ndarray
    exploitation: np.ndarray
    cooperation: np.ndarray
    case_label: list


#: Nudge used to resolve knife-edge cells, and the leading-eigenvalue level
#: above which a rest point counts as transversally unstable.
KNIFE_EDGE_KICK = 1e-8
_UNSTABLE_TOL = 1e-6


def _kicked_init(init):
    """Minutely asymmetric copy of a start, pushed inward at the faces."""
    out = init.copy()
    out[0] += KNIFE_EDGE_KICK if out[0] + KNIFE_EDGE_KICK <= 1.0 else -KNIFE_EDGE_KICK
    out[1] -= KNIFE_EDGE_KICK if out[1] - KNIFE_EDGE_KICK >= 0.0 else -KNIFE_EDGE_KICK
    return out


def _run_cells(pay, inits, speeds, config, band, threads):
    """Integrate every row of inits; per-cell failures never abort the sweep.

    A start sitting exactly on the stable set of an interior saddle (the
    midpoint lattice contains exactly symmetric starts, and the flow
    preserves that symmetry exactly) converges onto a rest point that
    repels every neighborhood.  Such knife-edge cells are resolved by
    re-running once from a deterministically nudged start: the nudge plays
    the role of the infinitesimal fluctuation the idealized dynamics
    suppress, and any physical realization would leave the saddle the same
    way.  Cells ending at attracting rest points are never re-run.
    """
    from .fixed_points import jacobian  # deferred: fixed_points imports dynamics

    m = inits.shape[0]
    terminal = [""] * m
    case = [""] * m
    vals = np.full((m, 4), np.nan)

    def work(i):
        try:
            strat = JointStrategy(*inits[i])
            out = sweep_cell(pay, strat, speeds, config, band)
            if out[0] == "Interior":
                jac = jacobian(pay, JointStrategy(*out[6]), speeds)
                lead = float(np.linalg.eigvals(jac).real.max())
                if lead > _UNSTABLE_TOL:
                    out = sweep_cell(pay, JointStrategy(*_kicked_init(inits[i])),
                                     speeds, config, band)
        except DegenerateEncountered:
            terminal[i] = "Unconverged"
            case[i] = "Other"
            return
        terminal[i] = out[0]
        vals[i, 0], vals[i, 1], vals[i, 2], vals[i, 3] = out[1:5]
        case[i] = out[5]

    if threads is None:
        threads = os.cpu_count() or 1
    if threads <= 1:
        for i in range(m):
            work(i)
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(work, range(m)))
    return terminal, vals, case


def _star_columns(vals):
    xe, ye = vals[:, 0], vals[:, 1]
    return xe, ye, vals[:, 2], vals[:, 3], ye - xe, (xe + ye) / 2.0


def basin_map(pay: PayoffMatrix, axis1: GridAxis, axis2: GridAxis,
              fixed: dict, speeds: LearningSpeeds = UNIT_SPEEDS,
              config: IntegratorConfig = DEFAULT_CONFIG,
              band: float = DOMINANCE_BAND, threads: int = None) -> SweepResult:
    """Terminal outcome for every initial condition on a 2-d grid.

    axis1/axis2 name the swept strategy components; `fixed` must supply
    exactly the remaining two.  Cells run row-major with axis1 outermost.
    """
    if axis1.name == axis2.name:
        raise ValidationError(f"swept axes must differ, got {axis1.name} twice")
    expected = set(STRATEGY_COMPONENTS) - {axis1.name, axis2.name}
    if set(fixed) != expected:
        raise ValidationError(
            f"fixed components {sorted(fixed)} must be exactly {sorted(expected)}")
    for name, v in fixed.items():
        if not (0.0 <= v <= 1.0):
            raise ValidationError(f"fixed component {name}={v} outside [0, 1]")

    idx = {name: k for k, name in enumerate(STRATEGY_COMPONENTS)}
    v1 = axis1.values()
    v2 = axis2.values()
    inits = np.empty((v1.size * v2.size, 4))
    for name, v in fixed.items():
        inits[:, idx[name]] = v
    a1_col = np.repeat(v1, v2.size)
    a2_col = np.tile(v2, v1.size)
    inits[:, idx[axis1.name]] = a1_col
    inits[:, idx[axis2.name]] = a2_col

    terminal, vals, case = _run_cells(pay, inits, speeds, config, band, threads)
    xe, ye, ue, ve, expl, coop = _star_columns(vals)
    return SweepResult(axis1=axis1, axis2=axis2, fixed=dict(fixed), payoff=pay,
                       speeds=speeds, config=config, init=inits,
                       terminal=terminal, x_e_star=xe, y_e_star=ye,
                       u_e_star=ue, v_e_star=ve, exploitation=expl,
                       cooperation=coop, case_label=case)


def grid4d_map(pay: PayoffMatrix, n: int, speeds: LearningSpeeds = UNIT_SPEEDS,
               config: IntegratorConfig = DEFAULT_CONFIG,
               band: float = DOMINANCE_BAND, threads: int = None) -> Grid4DResult:
    """Terminal outcome from every start of the n^4 midpoint lattice."""
    inits = uniform_grid_4d(n)
    terminal, vals, case = _run_cells(pay, inits, speeds, config, band, threads)
    xe, ye, ue, ve, expl, coop = _star_columns(vals)
    return Grid4DResult(n=n, payoff=pay, speeds=speeds, config=config,
                        init=inits, terminal=terminal, x_e_star=xe,
                        y_e_star=ye, u_e_star=ue, v_e_star=ve,
                        exploitation=expl, cooperation=coop, case_label=case)


@dataclass(eq=False)
class StabilityMap:
    """Feasibility and transverse stability over an (x_e, y_e) midpoint grid.

    status holds "ok", "infeasible", or "ambiguous" per cell; numeric
    grids are NaN-filled wherever status is not "ok".  Grids are indexed
    [i, j] for (x_e[i], y_e[j]).  The linearization settings travel with
    the result since the zero-split rule is a numerical choice.
    """

    payoff: PayoffMatrix
    speeds: LearningSpeeds
    n: int
    h: float
    zero_tol: float
    gap_min: float
    x_e: np.ndarray
    y_e: np.ndarray
    feasible: np.ndarray
    stable: np.ndarray
    oscillatory: np.ndarray
    n_zero: np.ndarray
    max_real: np.ndarray
    status: list

    @property
    def n_stable(self) -> int:
        return int(np.count_nonzero(self.stable))


def stability_region(pay: PayoffMatrix, n: int,
                     speeds: LearningSpeeds = UNIT_SPEEDS,
                     h: float = 1e-6, zero_tol: float = 1e-5,
                     gap_min: float = 10.0) -> StabilityMap:
    """Classify the interior rest point at every cell of an n x n midpoint grid."""
    if n < 1:
        raise ValidationError(f"grid resolution n={n} must be at least 1")
    mids = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
    feasible = np.zeros((n, n), dtype=bool)
    stable = np.zeros((n, n), dtype=bool)
    oscillatory = np.zeros((n, n), dtype=bool)
    n_zero = np.zeros((n, n), dtype=int)
    max_real = np.full((n, n), np.nan)
    status = [["infeasible"] * n for _ in range(n)]
    for i, xe in enumerate(mids):
        for j, ye in enumerate(mids):
            try:
                rep = classify_interior(pay, xe, ye, speeds, h=h,
                                        zero_tol=zero_tol, gap_min=gap_min)
            except OutOfStrategyBox:
                continue
            except AmbiguousZeroSplit:
                status[i][j] = "ambiguous"
                continue
            feasible[i, j] = True
            stable[i, j] = rep.stable
            oscillatory[i, j] = rep.oscillatory
            n_zero[i, j] = rep.n_zero
            by_mag = np.argsort(np.abs(rep.eigenvalues))
            max_real[i, j] = rep.eigenvalues[by_mag[2:]].real.max()
            status[i][j] = "ok"
    return StabilityMap(payoff=pay, speeds=speeds, n=n, h=h,
                        zero_tol=zero_tol, gap_min=gap_min,
                        x_e=mids, y_e=mids, feasible=feasible, stable=stable,
                        oscillatory=oscillatory, n_zero=n_zero,
                        max_real=max_real, status=status)


@dataclass(eq=False)
class MonotonicityReport:
    """Outcome of the closer-to-tit-for-tat robustness check.

    Each violation row is (x_c, x_d, x_c_pert, x_d_pert, terminal): a
    start that reached mutual cooperation whose TFT-ward perturbation did
    not.
    """

    payoff: PayoffMatrix
    opponent: tuple
    seed: int
    perturbation: float
    n_samples: int
    n_attempts: int
    base_inits: np.ndarray
    violations: list

    @property
    def n_violations(self) -> int:
        return len(self.violations)


def tft_monotonicity_check(pay: PayoffMatrix, opponent, n_samples: int,
                           speeds: LearningSpeeds = UNIT_SPEEDS,
                           config: IntegratorConfig = DEFAULT_CONFIG,
                           seed: int = 0, perturbation: float = 0.5,
                           max_attempts: int = None) -> MonotonicityReport:
    """Check that moving player 1's start toward tit-for-tat preserves cooperation.

    Samples player-1 starts against a fixed opponent start until n_samples
    of them reach mutual cooperation, then reruns each from a random
    perturbed start with x_c weakly larger and x_d weakly smaller (i.e.
    closer to TFT, staying inside the box).  Only stated for payoffs
    without the submodular gain structure, where no exploitative interior
    attractors interfere.
    """
    if pay.submodular:
        raise ValidationError(
            "monotonicity check applies to non-submodular payoffs only")
    if n_samples < 1:
        raise ValidationError(f"n_samples={n_samples} must be at least 1")
    if not (0.0 < perturbation <= 1.0):
        raise ValidationError(
            f"perturbation={perturbation} must lie in (0, 1]")
    y_c, y_d = float(opponent[0]), float(opponent[1])
    if not (0.0 <= y_c <= 1.0 and 0.0 <= y_d <= 1.0):
        raise ValidationError(f"opponent start ({y_c}, {y_d}) outside [0, 1]^2")
    if max_attempts is None:
        max_attempts = 50 * n_samples

    rng = np.random.default_rng(seed)
    base = []
    attempts = 0
    while len(base) < n_samples and attempts < max_attempts:
        attempts += 1
        x_c, x_d = rng.uniform(0.01, 0.99, size=2)
        init = JointStrategy(x_c, x_d, y_c, y_d)
        terminal = sweep_cell(pay, init, speeds, config)[0]
        if terminal == "PureCC":
            base.append((x_c, x_d))
    if len(base) < n_samples:
        raise NoConvergence(
            f"only {len(base)} of {n_samples} sampled starts reached mutual "
            f"cooperation in {max_attempts} attempts")

    violations = []
    for x_c, x_d in base:
        u1, u2 = rng.uniform(0.0, 1.0, size=2)
        x_c2 = x_c + perturbation * u1 * (1.0 - x_c)
        x_d2 = x_d - perturbation * u2 * x_d
        init = JointStrategy(x_c2, x_d2, y_c, y_d)
        terminal = sweep_cell(pay, init, speeds, config)[0]
        if terminal != "PureCC":
            violations.append((x_c, x_d, x_c2, x_d2, terminal))
    return MonotonicityReport(payoff=pay, opponent=(y_c, y_d), seed=seed,
                              perturbation=perturbation, n_samples=n_samples,
                              n_attempts=attempts,
                              base_inits=np.array(base).reshape(-1, 2),
                              violations=violations)
