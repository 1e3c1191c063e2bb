"""Learning dynamics of memory-one players in the iterated prisoner's dilemma.

Two reinforcement learners repeatedly play a prisoner's dilemma, each
conditioning its cooperation probability on the opponent's previous move and
nudging those probabilities up the gradient of its own long-run payoff.  The
package provides the closed-form stationary values of the repeated game, the
coupled learning flow and its integrator, the rest-point manifold with its
stability classification, and grid drivers that map which starts end in
mutual cooperation, mutual defection, or a locked asymmetric state where one
player exploits the other.
"""

from ._version import __version__
from .errors import (
    AmbiguousZeroSplit,
    DegenerateEncountered,
    DegenerateStrategyPair,
    IPDLearnError,
    NoConvergence,
    NotSubmodular,
    OrderingViolation,
    OutOfStrategyBox,
    RepeatedGameViolation,
    UnconvergedTrajectory,
    UnknownPlotKind,
    ValidationError,
)
from .game import (
    OUTCOMES,
    EquilibriumPoint,
    JointStrategy,
    PayoffMatrix,
    equilibrium,
    markov_matrix,
    response,
    stationary_distribution,
    validate_payoff,
)
from .dynamics import (
    DEFAULT_CONFIG,
    UNIT_SPEEDS,
    IntegratorConfig,
    LearningSpeeds,
    TrajectoryRecord,
    classify_trajectory,
    field_at,
    integrate,
    payoff_gap_1,
    payoff_gap_2,
    payoff_gap_series,
    vector_field,
)
from .fixed_points import (
    StabilityReport,
    boundary_curve_value,
    classify_interior,
    dynamic_stability_probe,
    eigenvalues_4x4,
    exploitation_boundaries,
    jacobian,
    manifold_point,
    most_exploitative,
    pure_cc_stable,
    pure_dd_stable,
)
from .sweep import (
    STRATEGY_COMPONENTS,
    Grid4DResult,
    GridAxis,
    MonotonicityReport,
    StabilityMap,
    SweepResult,
    basin_map,
    grid4d_map,
    stability_region,
    tft_monotonicity_check,
    uniform_grid_4d,
)
from .io import (
    RunManifest,
    emit_plot_script,
    read_grid4d_csv,
    read_sweep_csv,
    read_trajectory_csv,
    write_grid4d_csv,
    write_monotonicity_json,
    write_stability_csv,
    write_sweep_csv,
    write_trajectory_csv,
)

__all__ = [
    "__version__",
    # errors
    "IPDLearnError", "ValidationError", "OrderingViolation",
    "RepeatedGameViolation", "NotSubmodular", "OutOfStrategyBox",
    "UnknownPlotKind", "DegenerateStrategyPair", "DegenerateEncountered",
    "NoConvergence", "UnconvergedTrajectory", "AmbiguousZeroSplit",
    # game
    "OUTCOMES", "PayoffMatrix", "JointStrategy", "EquilibriumPoint",
    "validate_payoff", "equilibrium", "markov_matrix",
    "stationary_distribution", "response",
    # dynamics
    "LearningSpeeds", "UNIT_SPEEDS", "IntegratorConfig", "DEFAULT_CONFIG",
    "TrajectoryRecord", "payoff_gap_1", "payoff_gap_2", "payoff_gap_series",
    "field_at", "vector_field", "integrate", "classify_trajectory",
    # fixed points
    "pure_dd_stable", "pure_cc_stable", "manifold_point", "jacobian",
    "eigenvalues_4x4", "StabilityReport", "classify_interior",
    "boundary_curve_value", "exploitation_boundaries", "most_exploitative",
    "dynamic_stability_probe",
    # sweeps
    "STRATEGY_COMPONENTS", "uniform_grid_4d", "GridAxis", "SweepResult",
    "Grid4DResult", "basin_map", "grid4d_map", "StabilityMap",
    "stability_region", "MonotonicityReport", "tft_monotonicity_check",
    # i/o
    "RunManifest", "write_trajectory_csv", "read_trajectory_csv",
    "write_sweep_csv", "read_sweep_csv", "write_grid4d_csv",
    "read_grid4d_csv", "write_stability_csv", "write_monotonicity_json",
    "emit_plot_script",
]
