"""Derivative-free backtracking line search along a descent direction.

The trial stepsizes are ``gamma * rho**i`` for ``i = 0, 1, 2, ...`` and a
step is accepted once

    -F(z) . d >= sigma * alpha * clamp(||F(z)||, t1, t2) * ||d||**2

holds at the trial point ``z = x + alpha * d``.  The clamp keeps the
acceptance threshold proportional to the residual size but bounded away
from zero and from excessive magnitude, which is what later guarantees a
strictly positive separation for the hyperplane projection step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import clamp_scalar

__all__ = ["LineSearchParams", "LineSearchResult", "LineSearchFailure", "line_search"]


@dataclass(frozen=True)
class LineSearchParams:
    gamma: float = 1.0
    rho: float = 0.6
    sigma: float = 0.01
    t1: float = 1e-3
    t2: float = 0.4
    max_backtracks: int = 60

    def __post_init__(self):
        if not self.gamma > 0.0:
            raise ValueError("gamma must be positive")
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (0, 1)")
        if not self.sigma > 0.0:
            raise ValueError("sigma must be positive")
        if not 0.0 <= self.t1 <= self.t2:
            raise ValueError("need 0 <= t1 <= t2")
        if self.max_backtracks < 0:
            raise ValueError("max_backtracks must be nonnegative")


@dataclass(frozen=True, eq=False)
class LineSearchResult:
    """Accepted (or, on failure, last attempted) trial.

    ``trials`` is the number of residual evaluations spent, i.e. the number
    of candidate stepsizes tried including the accepted one.
    """

    alpha: float
    z: np.ndarray
    F_z: np.ndarray
    trials: int


class LineSearchFailure(RuntimeError):
    """No admissible stepsize within the backtracking budget.

    Usually signals a direction that is not a descent direction for the
    residual, or a residual map that is not monotone on the segment; the
    last trial is kept for diagnostics.
    """

    def __init__(self, message: str, last_trial: LineSearchResult):
        super().__init__(message)
        self.last_trial = last_trial


def line_search(F, x, d, F_x, params: LineSearchParams) -> LineSearchResult:
    """Backtrack along ``d`` from ``x`` until the acceptance test holds.

    ``F_x`` is the residual already evaluated at ``x``; it is accepted so
    that callers keep exact evaluation accounting (the acceptance test
    itself only evaluates ``F`` at trial points, one evaluation per trial).
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    dd = float(d @ d)
    if dd == 0.0:
        raise ValueError("line search requires a nonzero direction")

    alpha = params.gamma
    z = x
    F_z = np.asarray(F_x, dtype=float)
    trials = 0
    for i in range(params.max_backtracks + 1):
        alpha = params.gamma * params.rho**i
        z = x + alpha * d
        F_z = np.asarray(F(z), dtype=float)
        trials = i + 1
        lhs = -float(F_z @ d)
        threshold = params.sigma * alpha * clamp_scalar(
            np.linalg.norm(F_z), params.t1, params.t2
        ) * dd
        if lhs >= threshold:
            return LineSearchResult(alpha, z, F_z, trials)
    raise LineSearchFailure(
        f"no admissible stepsize in {trials} trials (last alpha={alpha:.3e})",
        LineSearchResult(alpha, z, F_z, trials),
    )
