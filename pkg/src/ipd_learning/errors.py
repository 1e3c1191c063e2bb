"""Exception taxonomy for the package.

``ValidationError`` subclasses mark problems with user-supplied inputs
(rejected payoff orderings, strategies outside the unit box, ...); the CLI
maps them to exit code 1.  Everything else derived from ``IPDLearnError``
is a runtime failure (exit code 2).
"""


class IPDLearnError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(IPDLearnError, ValueError):
    """Invalid user input (bad payoff ordering, out-of-range probability, ...)."""


class OrderingViolation(ValidationError):
    """Payoff values do not satisfy the strict ordering t > r > p > s."""


class RepeatedGameViolation(ValidationError):
    """Payoffs fail 2r > t + s, so alternating exploitation would beat mutual cooperation."""


class NotSubmodular(ValidationError):
    """Operation requires a submodular payoff matrix (t - r - p + s > 0)."""


class OutOfStrategyBox(ValidationError):
    """A zero-gap strategy pair would need a component outside [0, 1]."""


class DegenerateStrategyPair(IPDLearnError):
    """(x_c - x_d)(y_c - y_d) = 1: the round-to-round chain has no unique stationary law."""


class DegenerateEncountered(IPDLearnError):
    """Integration hit a degenerate strategy pair (only possible from corner starts)."""


class NoConvergence(IPDLearnError):
    """Iterative routine exhausted its iteration budget before reaching tolerance."""


class UnconvergedTrajectory(IPDLearnError):
    """Trajectory ended at the time horizon without meeting the convergence criterion."""


class AmbiguousZeroSplit(IPDLearnError):
    """Jacobian spectrum does not split cleanly into two near-zero and two finite eigenvalues."""


class UnknownPlotKind(ValidationError):
    """Requested plot-script kind is not one of the supported kinds."""
