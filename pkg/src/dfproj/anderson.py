"""Anderson acceleration wrapped around the hyperplane-projection solver.

Every iteration first runs one full step of the plain method to get the
projected candidate ``v_k``, then (from the second iteration on) forms an
extrapolated candidate from a short window of past pairs ``(x_j, v_j)``:

* window residuals ``r_j = v_j - x_j`` are combined with coefficients
  ``a`` minimizing ``||sum_j a_j r_j||**2`` over the probability simplex
  (a tiny Tikhonov term keeps the problem strictly convex), or without
  the sign constraint when the feasible set is the whole space;
* the candidate is a damped mix ``(1 - b_k) * x_avg + b_k * v_avg`` whose
  weight ``b_k`` shrinks like ``1 / (k**(1+eps) * ||v_avg - x_avg||)``;
* a safeguard accepts the candidate only while ``||x_avg - v_k||`` stays
  below a summable threshold ``c * k**-(1+eps)``, falling back to the
  plain step ``v_k`` otherwise.

The safeguard makes the accelerated iterates a summable perturbation of
the plain ones, so global convergence is inherited; the acceleration is
a pure extrapolation and costs one extra residual evaluation per
iteration (the stopping check at ``v_k``).
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .directions import DirectionState
from .geometry import WholeSpace
from .linesearch import LineSearchFailure, line_search
from .solver import (
    ProblemDef,
    SolveReport,
    SolveStatus,
    SolverConfig,
    TraceRecord,
    hyperplane_step,
    prepare_start,
    _distance,
)

__all__ = [
    "AaParams",
    "AaWindow",
    "IncrementalQr",
    "solve_coefficients_simplex",
    "solve_coefficients_unconstrained",
    "compute_bk",
    "safeguard_accept",
    "aa_mix",
    "solve_aa_dfpm",
]


@dataclass(frozen=True)
class AaParams:
    """Acceleration knobs.

    ``m`` is the window depth (the window holds up to ``m + 1`` entries),
    ``c`` the safeguard radius, ``b`` the cap on the mixing weight, ``lam``
    the Tikhonov weight of the coefficient problem, and ``decay_eps`` the
    exponent offset in the ``k**-(1+eps)`` decay schedules.  ``decay_eps``
    defaults to the solver's stopping tolerance when left unset.
    """

    m: int = 3
    c: float = 10.0
    b: float = 0.1
    lam: float = 1e-10
    decay_eps: float | None = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("window depth m must be at least 1")
        if not self.c > 0.0:
            raise ValueError("safeguard radius c must be positive")
        if not 0.0 < self.b < 1.0:
            raise ValueError("mixing cap b must lie in (0, 1)")
        if self.lam < 0.0:
            raise ValueError("Tikhonov weight must be nonnegative")
        if self.decay_eps is not None and not self.decay_eps > 0.0:
            raise ValueError("decay_eps must be positive when given")


class AaWindow:
    """Sliding window of the last iterates, projected points, and residuals.

    Pushing a pair ``(x, v)`` stores the residual ``r = v - x`` alongside,
    so the invariant ``r_j == v_j - x_j`` holds by construction; the oldest
    entry is evicted once the window exceeds ``m + 1`` entries.
    """

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("window depth m must be at least 1")
        self.m = m
        self._x: deque[np.ndarray] = deque(maxlen=m + 1)
        self._v: deque[np.ndarray] = deque(maxlen=m + 1)
        self._r: deque[np.ndarray] = deque(maxlen=m + 1)

    def __len__(self) -> int:
        return len(self._x)

    def push(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        r = v - x
        self._x.append(x)
        self._v.append(v)
        self._r.append(r)
        return r

    def residual_matrix(self) -> np.ndarray:
        """Rows are the stored residuals, oldest first."""
        return np.stack(tuple(self._r))

    def combine(self, a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Weighted averages ``(x_avg, v_avg)`` for coefficients ``a``."""
        a = np.asarray(a, dtype=float)
        if a.shape != (len(self),):
            raise ValueError("coefficient length does not match the window")
        x_avg = a @ np.stack(tuple(self._x))
        v_avg = a @ np.stack(tuple(self._v))
        return x_avg, v_avg


def solve_coefficients_simplex(R, lam: float) -> np.ndarray:
    """Exact minimizer of ``||R.T a||**2 + lam * ||a||**2`` over the simplex.

    ``R`` holds the window residuals as rows (p of them, p <= m + 1).  The
    problem is a tiny strictly convex QP, so the active set of the true
    minimizer is found by enumerating the nonempty supports, solving the
    equality-constrained system on each, and keeping the best feasible
    candidate.  Off-support coefficients are exact zeros.
    """
    R = np.atleast_2d(np.asarray(R, dtype=float))
    p = R.shape[0]
    if p < 1:
        raise ValueError("need at least one residual row")
    if lam < 0.0:
        raise ValueError("Tikhonov weight must be nonnegative")
    H = R @ R.T + lam * np.eye(p)

    best_obj = np.inf
    best_support: list[int] | None = None
    best_coeffs: np.ndarray | None = None
    for mask in range(1, 2**p):
        support = [j for j in range(p) if mask >> j & 1]
        q = len(support)
        K = np.zeros((q + 1, q + 1))
        K[:q, :q] = 2.0 * H[np.ix_(support, support)]
        K[:q, q] = 1.0
        K[q, :q] = 1.0
        rhs = np.zeros(q + 1)
        rhs[q] = 1.0
        try:
            sol = np.linalg.solve(K, rhs)
        except np.linalg.LinAlgError:
            sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
        a_s = sol[:q]
        if a_s.min() < -1e-12:
            continue
        obj = float(a_s @ H[np.ix_(support, support)] @ a_s)
        if obj < best_obj:
            best_obj = obj
            best_support = support
            best_coeffs = a_s

    # Singleton supports are always feasible, so a best candidate exists.
    a = np.zeros(p)
    a[best_support] = best_coeffs
    return a / a.sum()


def solve_coefficients_unconstrained(R) -> np.ndarray:
    """Minimize ``||sum_j a_j r_j||**2`` subject only to ``sum a = 1``.

    Eliminating the constraint through the last coefficient turns this into
    a plain least squares problem in the differences ``r_j - r_last``; the
    minimum-norm solution is taken when those differences are rank
    deficient.
    """
    R = np.atleast_2d(np.asarray(R, dtype=float))
    p = R.shape[0]
    if p < 1:
        raise ValueError("need at least one residual row")
    if p == 1:
        return np.ones(1)
    r_last = R[-1]
    D = (R[:-1] - r_last).T
    coeffs, *_ = np.linalg.lstsq(D, -r_last, rcond=None)
    return np.append(coeffs, 1.0 - coeffs.sum())


class IncrementalQr:
    """Thin QR of a set of columns maintained under append and drop-first.

    Used by the unconstrained coefficient path: the columns are successive
    residual differences, one new column arrives per iteration and the
    stalest one leaves once the window slides, so updating the factors
    costs O(n m) per iteration instead of a refactorization.  Linearly
    dependent columns are kept (with a zero diagonal entry); ``solve``
    falls back to a minimum-norm least squares solve in that case.
    """

    def __init__(self, n: int):
        self._Q = np.zeros((n, 0))
        self._R = np.zeros((0, 0))

    @property
    def ncols(self) -> int:
        return self._R.shape[1]

    def append(self, col) -> None:
        col = np.asarray(col, dtype=float)
        Q, R = self._Q, self._R
        proj = Q.T @ col
        q = col - Q @ proj
        # One reorthogonalization pass keeps Q orthonormal in practice.
        corr = Q.T @ q
        q = q - Q @ corr
        proj = proj + corr
        rho = float(np.linalg.norm(q))
        if rho > 0.0:
            q = q / rho
        p = self.ncols
        self._Q = np.column_stack([Q, q])
        R_new = np.zeros((p + 1, p + 1))
        R_new[:p, :p] = R
        R_new[:p, p] = proj
        R_new[p, p] = rho
        self._R = R_new

    def drop_first(self) -> None:
        if self.ncols == 0:
            raise ValueError("no columns to drop")
        Q = self._Q.copy()
        H = self._R[:, 1:].copy()
        p = self._R.shape[0]
        for i in range(p - 1):
            a, b = H[i, i], H[i + 1, i]
            r = float(np.hypot(a, b))
            if r == 0.0:
                continue
            c, s = a / r, b / r
            hi, hi1 = H[i, :].copy(), H[i + 1, :].copy()
            H[i, :] = c * hi + s * hi1
            H[i + 1, :] = -s * hi + c * hi1
            qi, qi1 = Q[:, i].copy(), Q[:, i + 1].copy()
            Q[:, i] = c * qi + s * qi1
            Q[:, i + 1] = -s * qi + c * qi1
        self._Q = Q[:, : p - 1]
        self._R = H[: p - 1, :]

    def solve(self, rhs) -> np.ndarray:
        """Least squares coefficients ``argmin ||cols @ gamma - rhs||``."""
        if self.ncols == 0:
            return np.zeros(0)
        rhs = np.asarray(rhs, dtype=float)
        projected = self._Q.T @ rhs
        diag = np.abs(np.diag(self._R))
        if diag.min() > 1e-12 * max(diag.max(), 1.0):
            return scipy.linalg.solve_triangular(self._R, projected)
        gamma, *_ = np.linalg.lstsq(self._R, projected, rcond=None)
        return gamma


def compute_bk(b: float, k: int, decay_eps: float, drift: float) -> float:
    """Damped mixing weight: ``min(b, 1 / (k**(1+eps) * drift))``.

    ``drift`` is ``||v_avg - x_avg||``; a zero drift means the mix is
    indifferent and the cap ``b`` is returned.
    """
    if k < 1:
        raise ValueError("mixing weight is only defined for k >= 1")
    if not 0.0 < b < 1.0:
        raise ValueError("mixing cap b must lie in (0, 1)")
    if drift < 0.0:
        raise ValueError("drift must be nonnegative")
    if drift == 0.0:
        return b
    return min(b, 1.0 / (k ** (1.0 + decay_eps) * drift))


def safeguard_accept(x_avg, v_k, c: float, k: int, decay_eps: float) -> bool:
    """Accept the accelerated candidate while ``||x_avg - v_k||`` is summable.

    The threshold ``c * k**-(1+eps)`` decays just fast enough that accepted
    steps perturb the plain iteration by a summable amount.
    """
    if k < 1:
        raise ValueError("safeguard is only defined for k >= 1")
    gap = float(np.linalg.norm(np.asarray(x_avg) - np.asarray(v_k)))
    return gap <= c * k ** -(1.0 + decay_eps)


def aa_mix(x_avg, v_avg, b_k: float) -> np.ndarray:
    """Convex mix ``(1 - b_k) * x_avg + b_k * v_avg``."""
    if not 0.0 < b_k <= 1.0:
        raise ValueError("mixing weight must lie in (0, 1]")
    return (1.0 - b_k) * np.asarray(x_avg, dtype=float) + b_k * np.asarray(
        v_avg, dtype=float
    )


def _window_coefficients(window: AaWindow, qr: IncrementalQr | None, lam: float):
    if qr is None:
        return solve_coefficients_simplex(window.residual_matrix(), lam)
    # Unconstrained path: solve in the successive-difference basis kept by
    # the incremental factorization, then map back to window coefficients.
    gamma = qr.solve(window._r[-1])
    increments = np.diff(gamma, prepend=0.0)
    return np.append(increments, 1.0 - gamma[-1]) if gamma.size else np.ones(1)


def solve_aa_dfpm(
    problem: ProblemDef, config: SolverConfig, aa: AaParams, x0
) -> SolveReport:
    """Run the accelerated projection method from ``x0``.

    Follows the plain method exactly through the projected candidate
    ``v_k`` (including an extra stopping check at ``v_k``, one residual
    evaluation), then either extrapolates through the window or falls back
    to ``v_k``.  The first iteration always takes the plain step.
    """
    t0 = time.perf_counter()
    decay = aa.decay_eps if aa.decay_eps is not None else config.epsilon
    x = prepare_start(problem, x0)
    unconstrained = isinstance(problem.feasible, WholeSpace)
    window = AaWindow(aa.m)
    qr = IncrementalQr(problem.dim) if unconstrained else None
    prev_r: np.ndarray | None = None
    state = DirectionState(0)
    trace: list[TraceRecord] | None = [] if config.record_trace else None
    f_evals = 0
    aa_steps = 0
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
            x = ls.z
            status = SolveStatus.CONVERGED
            iterations = k + 1
            residual = 0.0
            break

        v = hyperplane_step(x, ls.z, ls.F_z, config.zeta, problem.feasible)
        F_v = np.asarray(problem.F(v), dtype=float)
        f_evals += 1
        residual_v = float(np.linalg.norm(F_v))

        r = window.push(x, v)
        if qr is not None:
            if prev_r is not None:
                qr.append(r - prev_r)
                while qr.ncols > len(window) - 1:
                    qr.drop_first()
            prev_r = r

        record = None
        if trace is not None:
            record = TraceRecord(
                k=k,
                residual_norm=residual,
                alpha=ls.alpha,
                step_kind="projection",
                step_norm=ls.alpha * float(np.linalg.norm(d)),
                separation=float(ls.F_z @ (x - ls.z)),
                dist_to_solution=_distance(problem, x),
            )
            trace.append(record)

        if residual_v <= config.epsilon:
            x = v
            status = SolveStatus.CONVERGED
            iterations = k + 1
            residual = residual_v
            break

        if k == 0:
            x_next = v
        else:
            a = _window_coefficients(window, qr, aa.lam)
            x_avg, v_avg = window.combine(a)
            drift = float(np.linalg.norm(v_avg - x_avg))
            b_k = compute_bk(aa.b, k, decay, drift)
            if record is not None:
                record.safeguard_gap = float(np.linalg.norm(x_avg - v))
                record.safeguard_threshold = aa.c * k ** -(1.0 + decay)
                record.mixing = b_k
                record.mixing_step = b_k * drift
            if safeguard_accept(x_avg, v, aa.c, k, decay):
                x_next = aa_mix(x_avg, v_avg, b_k)
                aa_steps += 1
                if record is not None:
                    record.step_kind = "aa"
            else:
                x_next = v
                if record is not None:
                    record.step_kind = "fallback"

        state = state.advance(x, F_x, d)
        x = x_next

    return SolveReport(
        status=status,
        iterations=iterations,
        f_evals=f_evals,
        wall_seconds=time.perf_counter() - t0,
        final_residual_norm=residual,
        aa_steps=aa_steps,
        x=x,
        trace=trace,
    )
