"""Boundary-immobilization solver for the one-phase Stefan problem."""

from .fixed_boundary import solve_fixed_boundary, thomas_solve
from .grid import BoundaryCurve, Discretization, TemperatureField
from .iteration import (FluxIntegral, IterationConfig, IterationReport, LinearSlope,
                        UserCurve, run_iteration, stefan_residual)
from .operators import OperatorConfig, apply_P, apply_R
from .problem import Dirichlet, ExactSolution, Neumann, ProblemSpec, builtin_example
from .variational import discrepancy, refine_boundary

__all__ = [
    "BoundaryCurve", "Dirichlet", "Discretization", "ExactSolution", "FluxIntegral",
    "IterationConfig", "IterationReport", "LinearSlope", "Neumann", "OperatorConfig",
    "ProblemSpec", "TemperatureField", "UserCurve", "apply_P", "apply_R", "builtin_example",
    "discrepancy", "refine_boundary", "run_iteration", "solve_fixed_boundary",
    "stefan_residual", "thomas_solve",
]
