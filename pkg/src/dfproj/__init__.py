"""Derivative-free projection solvers for constrained monotone equations.

The package solves F(x) = 0 over a closed convex set for monotone,
Lipschitz-continuous maps F using only residual evaluations: conjugate
gradient style directions, a derivative-free backtracking line search,
and hyperplane projection steps, optionally wrapped in safeguarded
Anderson acceleration.  A benchmark harness, a small HTTP service, and a
CLI client sit on top.
"""

__version__ = "0.1.0"

from .anderson import AaParams, solve_aa_dfpm
from .directions import HttcgpParams, MsttcgpParams, ScgpParams
from .geometry import Box, NonnegativeOrthant, WholeSpace
from .linesearch import LineSearchParams
from .problems import LogisticProblem, make_problem
from .solver import ProblemDef, SolveReport, SolverConfig, SolveStatus, solve_dfpm

__all__ = [
    "__version__",
    "AaParams",
    "solve_aa_dfpm",
    "ScgpParams",
    "HttcgpParams",
    "MsttcgpParams",
    "Box",
    "NonnegativeOrthant",
    "WholeSpace",
    "LineSearchParams",
    "LogisticProblem",
    "make_problem",
    "ProblemDef",
    "SolveReport",
    "SolverConfig",
    "SolveStatus",
    "solve_dfpm",
]
