"""Two-stage stochastic LPs with fixed recourse and costs, solved through
optimal single scenarios and cost-driven forecasts."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    DimensionMismatch,
    FrfcError,
    Infeasible,
    InvalidParameter,
    NonFiniteObjective,
    NumericalFailure,
    SecondStageInfeasible,
    SecondStageUnbounded,
    SizeLimit,
    Unbounded,
)
from .lp import LinearProgram, LpSolution, LpStatus, solve_lp  # noqa: F401
from .optim import NelderMeadConfig, RandomSource, nelder_mead, sample  # noqa: F401
from .two_stage import (  # noqa: F401
    DEFAULT_PERTURBATION,
    FrfcProblem,
    Scenario,
    UniquenessPerturbation,
    construct_optimal_scenario,
    full_objective,
    one_scenario_solve,
    saa_solve,
    second_stage_value,
)
