"""Prabhakar fractional operators, nth-level derivatives and series solvers."""

from .errors import (
    ConstraintWarning, InsufficientSmoothness, InterpolationFailure, InvalidParams, LeavesAlgebra,
    ModeDivergence, NonConvergence, PrabhakarError, QuadratureFailure, TruncationWarning,
)
from .funcalg import MLSeries, MLTerm, from_power, kernel_term
from .levels import NthLevelSpec
from .mlf import E2Params, PrabhakarParams, SeriesControl, bivariate_e2, prabhakar_e
from .solvers import HeatProblem, IVPProblem, solve_heat, solve_ivp

__version__ = "0.1.0"

__all__ = [
    "ConstraintWarning", "E2Params", "HeatProblem", "IVPProblem", "InsufficientSmoothness",
    "InterpolationFailure", "InvalidParams", "LeavesAlgebra", "MLSeries", "MLTerm",
    "ModeDivergence", "NonConvergence", "NthLevelSpec", "PrabhakarError", "PrabhakarParams",
    "QuadratureFailure", "SeriesControl", "TruncationWarning", "bivariate_e2", "from_power",
    "kernel_term", "prabhakar_e", "solve_heat", "solve_ivp",
]
