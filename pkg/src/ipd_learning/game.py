"""Stage game and round-to-round structure for two memory-one players.

Both players condition their next cooperation probability on the opponent's
previous action only: player 1 plays (x_c, x_d), player 2 plays (y_c, y_d),
where the subscript is the opponent's last move.  Joint outcomes are ordered
(CC, CD, DC, DD) with player 1's action written first.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DegenerateStrategyPair,
    NoConvergence,
    OrderingViolation,
    RepeatedGameViolation,
    ValidationError,
)

#: Joint outcome order used by every 4-vector and matrix in the package.
OUTCOMES = ("CC", "CD", "DC", "DD")


@dataclass(frozen=True)
class PayoffMatrix:
    """One-shot payoffs: temptation t, reward r, punishment p, sucker s.

    Use ``validate_payoff`` to construct checked instances; direct
    construction performs no validation (handy for boundary studies).
    """

    t: float
    r: float
    p: float
    s: float

    @property
    def submodular(self) -> bool:
        """True when t - r - p + s > 0 (defection gains more against cooperation)."""
        return self.t - self.r - self.p + self.s > 0.0

    def player1_payoffs(self) -> np.ndarray:
        """Payoffs to player 1 over (CC, CD, DC, DD)."""
        return np.array([self.r, self.s, self.t, self.p])

    def player2_payoffs(self) -> np.ndarray:
        """Payoffs to player 2 over (CC, CD, DC, DD)."""
        return np.array([self.r, self.t, self.s, self.p])

    def as_tuple(self):
        return (self.t, self.r, self.p, self.s)


def validate_payoff(t, r, p, s) -> PayoffMatrix:
    """Checked constructor for dilemma payoffs.

    Requires the strict ordering T > R > P > S and the repeated-game
    condition 2R > T + S (mutual cooperation beats alternating
    exploitation).
    """
    if not (t > r > p > s):
        raise OrderingViolation(
            f"payoff ordering T > R > P > S violated: ({t}, {r}, {p}, {s})")
    if not (2.0 * r > t + s):
        raise RepeatedGameViolation(
            f"repeated-game condition 2R > T+S violated: 2*{r} = {2.0 * r} <= {t + s}")
    return PayoffMatrix(float(t), float(r), float(p), float(s))


@dataclass(frozen=True)
class JointStrategy:
    """Conditional cooperation probabilities for both players.

    x_c is player 1's cooperation probability after seeing the opponent
    cooperate, x_d after seeing defection; y_c, y_d likewise for player 2.
    """

    x_c: float
    x_d: float
    y_c: float
    y_d: float

    def __post_init__(self):
        for name in ("x_c", "x_d", "y_c", "y_d"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValidationError(
                    f"strategy probability {name}={v} outside [0, 1]")

    def as_array(self) -> np.ndarray:
        return np.array([self.x_c, self.x_d, self.y_c, self.y_d])

    def swapped(self) -> "JointStrategy":
        """The same pair with player roles exchanged."""
        return JointStrategy(self.y_c, self.y_d, self.x_c, self.x_d)

    @property
    def interior(self) -> bool:
        return (0.0 < self.x_c < 1.0 and 0.0 < self.x_d < 1.0
                and 0.0 < self.y_c < 1.0 and 0.0 < self.y_d < 1.0)


@dataclass(frozen=True, eq=False)
class EquilibriumPoint:
    """Stationary description of the repeated game for one strategy pair.

    p_e is the stationary distribution over (CC, CD, DC, DD); x_e and y_e
    are the players' marginal cooperation rates; u_e and v_e the stationary
    per-round payoffs.  p_e is stored explicitly rather than recomputed so
    downstream consumers all see the same distribution.
    """

    x_e: float
    y_e: float
    p_e: np.ndarray
    u_e: float
    v_e: float


def equilibrium_values(pay: PayoffMatrix, x_c, x_d, y_c, y_d):
    """Stationary cooperation rates and payoffs from raw floats.

    No box validation: derivative stencils legitimately evaluate the same
    rational expressions slightly outside [0, 1].
    Returns (x_e, y_e, u_e, v_e).
    """
    ok, xe, ye, ue, ve, _, _ = _kernels.core_values(
        x_c, x_d, y_c, y_d, pay.t, pay.r, pay.p, pay.s)
    if not ok:
        raise DegenerateStrategyPair(
            f"(x_c - x_d)(y_c - y_d) = 1 within {_kernels.DEGENERACY_TOL}: "
            "no unique stationary law")
    return xe, ye, ue, ve


def equilibrium(pay: PayoffMatrix, strat: JointStrategy) -> EquilibriumPoint:
    """Unique stationary point of the round-to-round chain.

    Raises DegenerateStrategyPair when (x_c - x_d)(y_c - y_d) = 1, which
    only happens for corner pairs such as tit-for-tat against itself.
    """
    xe, ye, ue, ve = equilibrium_values(
        pay, strat.x_c, strat.x_d, strat.y_c, strat.y_d)
    p_e = np.array([xe * ye, xe * (1.0 - ye), (1.0 - xe) * ye,
                    (1.0 - xe) * (1.0 - ye)])
    return EquilibriumPoint(x_e=xe, y_e=ye, p_e=p_e, u_e=ue, v_e=ve)


def markov_matrix(strat: JointStrategy) -> np.ndarray:
    """Column-stochastic transition matrix of the joint-outcome chain.

    Column j is the distribution of the next outcome given previous outcome
    OUTCOMES[j]; each player reacts to the opponent's half of the outcome.
    """
    xc, xd, yc, yd = strat.x_c, strat.x_d, strat.y_c, strat.y_d
    # Player 1's next cooperation probability per previous outcome: the
    # opponent's action is the second letter, so columns order (C, D, C, D)
    # for player 2's view and (C, C, D, D) for player 1's.
    a = np.array([xc, xd, xc, xd])
    b = np.array([yc, yc, yd, yd])
    return np.array([a * b,
                     a * (1.0 - b),
                     (1.0 - a) * b,
                     (1.0 - a) * (1.0 - b)])


def stationary_distribution(strat: JointStrategy, tol: float = 1e-13,
                            max_iter: int = 1_000_000) -> np.ndarray:
    """Stationary distribution by plain power iteration on the chain.

    Deliberately avoids the closed-form expressions so it can serve as an
    independent check of `equilibrium`.  Requires an interior strategy pair
    (then the chain is irreducible and aperiodic).  Iterates p <- M p from
    the uniform distribution until the residual ||M p - p||_inf drops below
    tol; raises NoConvergence if max_iter is exhausted first.
    """
    if not strat.interior:
        raise ValidationError(
            "stationary_distribution requires an interior strategy pair")
    m = markov_matrix(strat)
    pvec = np.full(4, 0.25)
    for _ in range(max_iter):
        nxt = m @ pvec
        if np.max(np.abs(nxt - pvec)) < tol:
            return nxt
        pvec = nxt
    raise NoConvergence(
        f"power iteration did not reach tol={tol} in {max_iter} iterations")


def response(x_c, x_d, y):
    """Next-round cooperation probability against an opponent cooperating at rate y.

    Linear in y with slope x_c - x_d; its graph against the opponent's
    response line crosses at the stationary cooperation rates.
    """
    return y * (x_c - x_d) + x_d
