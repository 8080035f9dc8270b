"""Hyperplane-projection solver for monotone residual maps over convex sets.

Each iteration evaluates the residual, builds a descent direction, runs the
derivative-free line search to get a trial point ``z_k``, and then projects
the current iterate onto the feasible set after stepping along ``F(z_k)``:

    x_{k+1} = P_C[ x_k - zeta * u_k * F(z_k) ],
    u_k = F(z_k) . (x_k - z_k) / ||F(z_k)||**2 .

For monotone maps the hyperplane through ``z_k`` with normal ``F(z_k)``
separates ``x_k`` from the solution set, so the update is Fejer monotone
with respect to every solution; no derivatives or matrix storage are used.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .directions import DirectionState, HttcgpParams, MsttcgpParams, ScgpParams
from .geometry import FeasibleSet
from .linesearch import LineSearchFailure, LineSearchParams, line_search

__all__ = [
    "ProblemDef",
    "SolverConfig",
    "SolveStatus",
    "TraceRecord",
    "SolveReport",
    "hyperplane_step",
    "solve_dfpm",
]

logger = logging.getLogger(__name__)

DirectionRule = ScgpParams | HttcgpParams | MsttcgpParams


@dataclass(frozen=True, eq=False)
class ProblemDef:
    """A residual map together with its feasible set and known metadata.

    ``F`` maps a 1-d array of length ``dim`` to a 1-d array of the same
    length and is assumed monotone and continuous on the feasible set.
    ``known_solution`` is optional and only used for diagnostics (distance
    decrease checks); ``lipschitz`` and ``strong_monotone_mu`` are optional
    constants when they are known for the map.
    """

    dim: int
    F: Callable[[np.ndarray], np.ndarray]
    feasible: FeasibleSet
    known_solution: np.ndarray | None = None
    lipschitz: float | None = None
    strong_monotone_mu: float | None = None
    name: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("problem dimension must be at least 1")
        if self.known_solution is not None:
            sol = np.asarray(self.known_solution, dtype=float)
            if sol.shape != (self.dim,):
                raise ValueError("known_solution has the wrong dimension")
            object.__setattr__(self, "known_solution", sol)


@dataclass(frozen=True, eq=False)
class SolverConfig:
    """Configuration shared by the plain and the accelerated solver.

    ``zeta`` is the relaxation factor of the hyperplane projection step and
    must lie strictly inside (0, 2); ``epsilon`` is the stopping tolerance
    on the residual norm (stop when ``||F|| <= epsilon``).
    """

    direction: DirectionRule
    line_search: LineSearchParams = field(default_factory=LineSearchParams)
    zeta: float = 1.7
    epsilon: float = 1e-6
    max_iter: int = 2000
    record_trace: bool = False

    def __post_init__(self):
        if not 0.0 < self.zeta < 2.0:
            raise ValueError("zeta must lie strictly inside (0, 2)")
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


class SolveStatus(str, Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    LINE_SEARCH_FAILURE = "line_search_failure"


@dataclass
class TraceRecord:
    """Per-iteration diagnostics, recorded only when asked for.

    ``residual_norm`` is ``||F(x_k)||`` at the start of the iteration,
    ``step_norm`` is ``alpha_k * ||d_k||``, and ``separation`` is
    ``F(z_k) . (x_k - z_k)``.  The remaining fields are filled by the
    accelerated solver only: ``safeguard_gap`` and ``safeguard_threshold``
    are the two sides of its acceptance test and ``mixing_step`` is
    ``b_k * ||v_avg - x_avg||``.
    """

    k: int
    residual_norm: float
    alpha: float
    step_kind: str
    step_norm: float
    separation: float
    dist_to_solution: float | None = None
    safeguard_gap: float | None = None
    safeguard_threshold: float | None = None
    mixing: float | None = None
    mixing_step: float | None = None


@dataclass
class SolveReport:
    """Outcome of a solve: status, counters, final iterate, optional trace.

    ``iterations`` counts completed iterations (a run that stops because the
    very first residual is small enough reports 0); ``f_evals`` counts every
    call of the residual map, including line search trials and the final
    stopping check.
    """

    status: SolveStatus
    iterations: int
    f_evals: int
    wall_seconds: float
    final_residual_norm: float
    aa_steps: int
    x: np.ndarray
    trace: list[TraceRecord] | None = None

    @property
    def converged(self) -> bool:
        return self.status is SolveStatus.CONVERGED


def hyperplane_step(x, z, F_z, zeta: float, feasible: FeasibleSet) -> np.ndarray:
    """Relaxed projection of ``x`` onto the separating hyperplane, then onto C.

    Raises if ``F_z`` is exactly zero: in that case ``z`` already solves the
    system and the caller should have stopped instead.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    F_z = np.asarray(F_z, dtype=float)
    nF2 = float(F_z @ F_z)
    if nF2 == 0.0:
        raise ValueError("residual at the trial point is zero; z solves the system")
    u = float(F_z @ (x - z)) / nF2
    return feasible.project(x - zeta * u * F_z)


def prepare_start(problem: ProblemDef, x0) -> np.ndarray:
    """Validate the starting point and project it into the feasible set."""
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (problem.dim,):
        raise ValueError(
            f"starting point of dimension {x0.shape} does not match problem "
            f"dimension {problem.dim}"
        )
    if not problem.feasible.contains(x0):
        logger.warning("starting point is infeasible; projecting it onto the set")
        return problem.feasible.project(x0)
    return x0


def _distance(problem: ProblemDef, x) -> float | None:
    if problem.known_solution is None:
        return None
    return float(np.linalg.norm(x - problem.known_solution))


def solve_dfpm(problem: ProblemDef, config: SolverConfig, x0) -> SolveReport:
    """Run the plain projection method from ``x0`` until the residual is small.

    Stops with CONVERGED when ``||F(x_k)|| <= epsilon`` (or when a line
    search trial point solves the system exactly), with MAX_ITER after
    ``max_iter`` completed iterations, and with LINE_SEARCH_FAILURE when no
    admissible stepsize exists within the backtracking budget.
    """
    t0 = time.perf_counter()
    x = prepare_start(problem, x0)
    state = DirectionState(0)
    trace: list[TraceRecord] | None = [] if config.record_trace else None
    f_evals = 0
    status = SolveStatus.MAX_ITER
    iterations = 0
    residual = np.inf

    for k in range(config.max_iter + 1):
        F_x = np.asarray(problem.F(x), dtype=float)
        f_evals += 1
        residual = float(np.linalg.norm(F_x))
        if residual <= config.epsilon:
            status = SolveStatus.CONVERGED
            iterations = k
            break
        if k == config.max_iter:
            status = SolveStatus.MAX_ITER
            iterations = k
            break

        d = config.direction(F_x, x, state)
        try:
            ls = line_search(problem.F, x, d, F_x, config.line_search)
            f_evals += ls.trials
        except LineSearchFailure as err:
            f_evals += err.last_trial.trials
            status = SolveStatus.LINE_SEARCH_FAILURE
            iterations = k
            break

        if np.linalg.norm(ls.F_z) == 0.0:
            # Exact root at the trial point; adopting it finishes the run.
            x = ls.z
            status = SolveStatus.CONVERGED
            iterations = k + 1
            residual = 0.0
            break

        x_next = hyperplane_step(x, ls.z, ls.F_z, config.zeta, problem.feasible)
        if trace is not None:
            trace.append(
                TraceRecord(
                    k=k,
                    residual_norm=residual,
                    alpha=ls.alpha,
                    step_kind="projection",
                    step_norm=ls.alpha * float(np.linalg.norm(d)),
                    separation=float(ls.F_z @ (x - ls.z)),
                    dist_to_solution=_distance(problem, x),
                )
            )
        state = state.advance(x, F_x, d)
        x = x_next

    return SolveReport(
        status=status,
        iterations=iterations,
        f_evals=f_evals,
        wall_seconds=time.perf_counter() - t0,
        final_residual_norm=residual,
        aa_steps=0,
        x=x,
        trace=trace,
    )
