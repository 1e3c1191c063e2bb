"""Gradient-ascent learning dynamics over memory-one strategy space.

Each player nudges its two conditional cooperation probabilities up the
gradient of its own stationary payoff.  The resulting vector field factors
into replicator-style boundary terms times the gap between cooperating and
defecting continuation payoffs, so the unit box is forward invariant and
every face is preserved.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DegenerateEncountered,
    DegenerateStrategyPair,
    UnconvergedTrajectory,
    ValidationError,
)
from .game import (
    JointStrategy,
    PayoffMatrix,
    equilibrium_values,
    markov_matrix,
    stationary_distribution,
)

#: Half-width of the noise band around x_e == y_e inside which the two
#: players are treated as tied when classifying trajectories.
DOMINANCE_BAND = 0.02

#: Cooperation-rate thresholds for calling a terminal state pure.
PURE_LOW = 0.01
PURE_HIGH = 0.99

TERMINAL_LABELS = ("PureDD", "PureCC", "Interior", "Unconverged")
CASE_LABELS = ("Case1", "Case2", "Case3", "Case4", "Other")


@dataclass(frozen=True)
class LearningSpeeds:
    """Positive rate multipliers for the four strategy components."""

    s_1c: float = 1.0
    s_1d: float = 1.0
    s_2c: float = 1.0
    s_2d: float = 1.0

    def __post_init__(self):
        for name in ("s_1c", "s_1d", "s_2c", "s_2d"):
            v = getattr(self, name)
            if not v > 0.0:
                raise ValidationError(f"learning speed {name}={v} must be positive")

    def as_tuple(self):
        return (self.s_1c, self.s_1d, self.s_2c, self.s_2d)


UNIT_SPEEDS = LearningSpeeds()


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings.

    Integration stops once the sup-norm of the field drops below
    converge_tol (interior attractors are neutral along two directions, so
    a state-delta test would never fire there) or when t_max is reached.
    """

    dt: float = 0.01
    t_max: float = 1e5
    converge_tol: float = 1e-10
    sample_interval: float = 0.1

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValidationError(f"dt={self.dt} must be positive")
        if not self.t_max >= self.dt:
            raise ValidationError(f"t_max={self.t_max} must be at least dt")
        if not self.converge_tol > 0.0:
            raise ValidationError(
                f"converge_tol={self.converge_tol} must be positive")
        if not self.sample_interval > 0.0:
            raise ValidationError(
                f"sample_interval={self.sample_interval} must be positive")

    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))

    def stride(self) -> int:
        return max(1, int(round(self.sample_interval / self.dt)))


DEFAULT_CONFIG = IntegratorConfig()


@dataclass(eq=False)
class TrajectoryRecord:
    """Sampled trajectory plus its terminal and qualitative classification.

    states columns are (x_c, x_d, y_c, y_d); eq_track columns are
    (x_e, y_e, u_e, v_e) evaluated at the sampled states.
    """

    times: np.ndarray
    states: np.ndarray
    eq_track: np.ndarray
    terminal: str
    case_label: str


def payoff_gap_1(pay: PayoffMatrix, strat: JointStrategy) -> float:
    """Stationary payoff gap for player 1 between cooperating and defecting now.

    Positive means cooperation pays once the opponent's geometric echo of
    the deviation is resummed.
    """
    ok, _, _, _, _, gap1, _ = _kernels.core_values(
        strat.x_c, strat.x_d, strat.y_c, strat.y_d,
        pay.t, pay.r, pay.p, pay.s)
    if not ok:
        raise DegenerateStrategyPair("payoff gap undefined for a degenerate pair")
    return gap1


def payoff_gap_2(pay: PayoffMatrix, strat: JointStrategy) -> float:
    """Player 2's analogue of payoff_gap_1."""
    ok, _, _, _, _, _, gap2 = _kernels.core_values(
        strat.x_c, strat.x_d, strat.y_c, strat.y_d,
        pay.t, pay.r, pay.p, pay.s)
    if not ok:
        raise DegenerateStrategyPair("payoff gap undefined for a degenerate pair")
    return gap2


def payoff_gap_series(pay: PayoffMatrix, strat: JointStrategy,
                      horizon: int) -> float:
    """Player 1's cooperate-vs-defect gap summed round by round.

    Independent oracle for payoff_gap_1: starts from the two one-round
    deviation distributions and pushes their difference through `horizon`
    applications of the transition matrix, accumulating the payoff
    difference term by term.  The difference vector contracts by
    (x_c - x_d)(y_c - y_d) every two rounds, so the truncation error is
    geometric.  Requires an interior pair (the opponent's stationary
    cooperation rate is taken from the power-iteration oracle, keeping the
    whole route clear of the closed forms).
    """
    if horizon < 1:
        raise ValidationError(f"horizon={horizon} must be at least 1")
    p_star = stationary_distribution(strat)
    ye = p_star[0] + p_star[2]
    m = markov_matrix(strat)
    pay1 = pay.player1_payoffs()
    diff = np.array([ye, 1.0 - ye, -ye, -(1.0 - ye)])
    total = 0.0
    for _ in range(horizon):
        total += diff @ pay1
        diff = m @ diff
    return total


def field_at(pay: PayoffMatrix, x_c, x_d, y_c, y_d,
             speeds: LearningSpeeds = UNIT_SPEEDS):
    """Field components from raw floats (no box validation; stencil-friendly)."""
    ok, f0, f1, f2, f3 = _kernels.field_values(
        x_c, x_d, y_c, y_d, pay.t, pay.r, pay.p, pay.s,
        speeds.s_1c, speeds.s_1d, speeds.s_2c, speeds.s_2d)
    if not ok:
        raise DegenerateStrategyPair("vector field undefined for a degenerate pair")
    return f0, f1, f2, f3


def vector_field(pay: PayoffMatrix, strat: JointStrategy,
                 speeds: LearningSpeeds = UNIT_SPEEDS) -> np.ndarray:
    """Time derivative of (x_c, x_d, y_c, y_d) under self-interested learning."""
    return np.array(field_at(pay, strat.x_c, strat.x_d, strat.y_c,
                             strat.y_d, speeds))


def _case_from_stats(terminal: str, had_excursion: bool, n_flips: int,
                     final_out_of_band: bool) -> str:
    """Map terminal kind plus dominance-indicator statistics to a case label.

    The indicator is x_e - y_e sampled along the trajectory; "out of band"
    means it left the +-DOMINANCE_BAND noise strip around the tie line.
    """
    if terminal == "PureCC":
        return "Case3" if had_excursion else "Case1"
    if terminal == "Interior":
        if n_flips >= 1:
            return "Case4"
        if final_out_of_band:
            return "Case2"
        return "Other"
    return "Other"


def _terminal_from_eq(x_e: float, y_e: float) -> str:
    if x_e < PURE_LOW and y_e < PURE_LOW:
        return "PureDD"
    if x_e > PURE_HIGH and y_e > PURE_HIGH:
        return "PureCC"
    return "Interior"


def _run_kernel(pay, init, speeds, config, band, record):
    """Shared launch path for integrate() and the sweep drivers."""
    n_steps = config.n_steps()
    stride = config.stride()
    if record:
        cap = n_steps // stride + 2
        times = np.empty(cap)
        states = np.empty((cap, 4))
        eq_track = np.empty((cap, 4))
    else:
        times = np.empty(1)
        states = np.empty((1, 4))
        eq_track = np.empty((1, 4))
    out = _kernels.rk4_trajectory(
        init.x_c, init.x_d, init.y_c, init.y_d,
        pay.t, pay.r, pay.p, pay.s,
        speeds.s_1c, speeds.s_1d, speeds.s_2c, speeds.s_2d,
        config.dt, n_steps, config.converge_tol, stride, band,
        record, times, states, eq_track)
    status, n_rec, _, xc, xd, yc, yd, had_exc, n_flips, final_d = out
    if status == _kernels.STATUS_DEGENERATE:
        raise DegenerateEncountered(
            "integration reached a degenerate strategy pair")
    final = (xc, xd, yc, yd)
    stats = (had_exc, n_flips, abs(final_d) > band)
    converged = status == _kernels.STATUS_CONVERGED
    return times[:n_rec], states[:n_rec], eq_track[:n_rec], final, converged, stats


def integrate(pay: PayoffMatrix, init: JointStrategy,
              speeds: LearningSpeeds = UNIT_SPEEDS,
              config: IntegratorConfig = DEFAULT_CONFIG,
              band: float = DOMINANCE_BAND) -> TrajectoryRecord:
    """Integrate the learning dynamics from init until convergence or t_max.

    The record samples every config.sample_interval time units plus the
    final state.  terminal is "Unconverged" when the field norm never
    dropped below converge_tol; otherwise the terminal kind and the case
    label are read off the sampled dominance indicator.
    """
    times, states, eq_track, final, converged, stats = _run_kernel(
        pay, init, speeds, config, band, record=True)
    if converged:
        xe, ye, _, _ = equilibrium_values(pay, *final)
        terminal = _terminal_from_eq(xe, ye)
        had_exc, n_flips, final_out = stats
        case = _case_from_stats(terminal, had_exc, n_flips, final_out)
    else:
        terminal = "Unconverged"
        case = "Other"
    return TrajectoryRecord(times=times, states=states, eq_track=eq_track,
                            terminal=terminal, case_label=case)


def classify_trajectory(rec: TrajectoryRecord,
                        band: float = DOMINANCE_BAND) -> str:
    """Case label recomputed from a record's sampled equilibrium track.

    Matches the label integrate() assigns when called with the same band.
    Raises UnconvergedTrajectory for records that hit the time horizon.
    """
    if rec.terminal == "Unconverged":
        raise UnconvergedTrajectory("cannot classify an unconverged trajectory")
    d = rec.eq_track[:, 0] - rec.eq_track[:, 1]
    out = np.abs(d) > band
    had_exc = bool(out.any())
    signs = np.sign(d[out])
    n_flips = int(np.count_nonzero(np.diff(signs))) if signs.size else 0
    final_out = bool(out[-1]) if d.size else False
    return _case_from_stats(rec.terminal, had_exc, n_flips, final_out)


def sweep_cell(pay: PayoffMatrix, init: JointStrategy,
               speeds: LearningSpeeds = UNIT_SPEEDS,
               config: IntegratorConfig = DEFAULT_CONFIG,
               band: float = DOMINANCE_BAND):
    """Terminal summary of one trajectory without storing it.

    Returns (terminal, x_e, y_e, u_e, v_e, case_label, final_state); the
    stationary slots are NaN when the trajectory did not converge.
    Dominance statistics are tracked inside the integration kernel at the
    same sample stride integrate() records at, so the labels agree bitwise.
    """
    _, _, _, final, converged, stats = _run_kernel(
        pay, init, speeds, config, band, record=False)
    if not converged:
        return ("Unconverged", math.nan, math.nan, math.nan, math.nan,
                "Other", final)
    xe, ye, ue, ve = equilibrium_values(pay, *final)
    terminal = _terminal_from_eq(xe, ye)
    had_exc, n_flips, final_out = stats
    case = _case_from_stats(terminal, had_exc, n_flips, final_out)
    return terminal, xe, ye, ue, ve, case, final
