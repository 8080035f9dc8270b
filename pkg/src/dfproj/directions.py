"""Search-direction rules for the projection solvers.

Each rule maps the current residual ``F_k`` (together with the previous
point, residual, and direction) to a new search direction.  All three
rules share two structural guarantees that the solver depends on:

* sufficient descent: ``F_k . d_k <= -s1 * ||F_k||**2`` for a rule-specific
  constant ``s1 > 0``;
* boundedness: ``||d_k|| <= s2 * ||F_k||`` for a rule-specific ``s2``.

At the first iteration every rule returns ``-F_0``.  The rules never
evaluate the residual map themselves; they are pure functions of the
supplied vectors, which keeps the solver's evaluation accounting exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DirectionState",
    "ScgpParams",
    "HttcgpParams",
    "MsttcgpParams",
    "direction_scgp",
    "direction_httcgp",
    "direction_msttcgp",
]


@dataclass(frozen=True, eq=False)
class DirectionState:
    """History carried between iterations.

    At ``k == 0`` there is no history and the previous-step fields stay
    ``None``; for ``k >= 1`` all three must be present with matching shapes.
    """

    k: int
    x_prev: np.ndarray | None = None
    F_prev: np.ndarray | None = None
    d_prev: np.ndarray | None = None

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("iteration index must be nonnegative")
        if self.k > 0:
            if self.x_prev is None or self.F_prev is None or self.d_prev is None:
                raise ValueError("history vectors are required for k >= 1")
            shapes = {self.x_prev.shape, self.F_prev.shape, self.d_prev.shape}
            if len(shapes) != 1:
                raise ValueError("history vectors must share one shape")

    def advance(self, x, F_x, d) -> "DirectionState":
        """State for the next iteration after stepping away from ``x``."""
        return DirectionState(self.k + 1, x, F_x, d)


def _history(F_k, state):
    F_k = np.asarray(F_k, dtype=float)
    if state.d_prev.shape != F_k.shape:
        raise ValueError("residual dimension does not match stored history")
    y = F_k - state.F_prev
    return F_k, state.d_prev, y


@dataclass(frozen=True)
class ScgpParams:
    """Parameters of the spectral conjugate gradient rule.

    ``chi`` scales the fallback term inside the max that defines the
    conjugacy coefficient, ``zeta_dir`` scales the previous direction in
    the out-of-range branch, ``tau`` enters the spectral correction of the
    gradient difference, and ``[theta_lo, theta_hi]`` is the admissible
    window for the spectral coefficient.
    """

    chi: float = 0.2
    zeta_dir: float = 0.5
    tau: float = 1.0
    theta_lo: float = 0.3
    theta_hi: float = 10.0

    tag = "scgp"
    # Conservative floor used by the descent property tests; the provable
    # constant is min(theta_lo - 1/4, theta_lo - chi, 1 - zeta_dir), which
    # the validation below keeps positive.
    descent_floor = 0.01

    def __post_init__(self):
        if not 0.0 < self.chi < 0.25:
            raise ValueError("chi must lie in (0, 1/4)")
        if not 0.0 <= self.zeta_dir < 1.0:
            raise ValueError("zeta_dir must lie in [0, 1)")
        if not self.tau > 0.0:
            raise ValueError("tau must be positive")
        if not 0.25 < self.theta_lo <= self.theta_hi:
            raise ValueError("need 1/4 < theta_lo <= theta_hi")

    @property
    def bound_constant(self) -> float:
        """Provable (loose) norm cap: ``||d_k|| <= bound_constant * ||F_k||``.

        The curvature denominator satisfies d_prev . v >= ||y|| ||d_prev||,
        the corrected difference satisfies ||eta|| <= (2 + tau) ||y||, and
        the spectral coefficient is capped by theta_hi; the empirical
        supremum used by the tests is far smaller.
        """
        return max(
            self.theta_hi + (2.0 + self.tau) * (3.0 + self.tau),
            1.0 + self.zeta_dir,
        )

    def __call__(self, F_k, x, state):
        return direction_scgp(F_k, x, state, self)


@dataclass(frozen=True)
class HttcgpParams:
    """Parameters of the hybrid three-term rule.

    ``mu`` sets the curvature floor inside the denominator
    ``max(mu * ||d|| * ||y||, d.y, ||F_prev||**2)`` and ``delta`` scales the
    third (gradient-difference) term.
    """

    mu: float = 0.01
    delta: float = 0.5

    tag = "httcgp"

    def __post_init__(self):
        if not self.mu > 0.0:
            raise ValueError("mu must be positive")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")

    @property
    def descent_floor(self) -> float:
        """Exact descent constant: ``F . d <= -floor * ||F||**2``.

        Writing t = ||y|| |F . d_prev| / tau, the cross terms of F . d are
        at most (1 + delta) ||F|| t - t**2 <= (1 + delta)**2 ||F||**2 / 4,
        and the bound is tight (iterates of the solver get within 1e-3 of
        it), so no larger constant is safe.
        """
        return 1.0 - (1.0 + self.delta) ** 2 / 4.0

    @property
    def bound_constant(self) -> float:
        """Provable norm bound: ``||d_k|| <= bound_constant * ||F_k||``.

        From tau >= mu * ||d_prev|| * ||y||: the beta term contributes at
        most (1/mu + 1/mu**2) ||F|| and the y term at most (delta/mu) ||F||.
        """
        return 1.0 + (1.0 + self.delta) / self.mu + 1.0 / self.mu**2

    def __call__(self, F_k, x, state):
        return direction_httcgp(F_k, x, state, self)


@dataclass(frozen=True)
class MsttcgpParams:
    """Parameters of the modified spectral three-term rule.

    Same denominator floor ``mu`` as the hybrid rule; ``[theta_lo,
    theta_hi]`` is the admissible window for the spectral coefficient.
    """

    mu: float = 0.01
    theta_lo: float = 0.3
    theta_hi: float = 10.0

    tag = "msttcgp"
    descent_floor = 0.01

    def __post_init__(self):
        if not self.mu > 0.0:
            raise ValueError("mu must be positive")
        if not 0.0 < self.theta_lo <= self.theta_hi:
            raise ValueError("need 0 < theta_lo <= theta_hi")

    @property
    def bound_constant(self) -> float:
        """Exact norm bound: ||d_k|| <= bound_constant * ||F_k||."""
        return max(1.0, self.theta_hi) + 2.0 / self.mu

    def __call__(self, F_k, x, state):
        return direction_msttcgp(F_k, x, state, self)


def direction_scgp(F_k, x, state, params: ScgpParams) -> np.ndarray:
    """Spectral conjugate gradient direction.

    The conjugacy coefficient is a max of a curvature-corrected quotient
    and a small multiple of ``F_k . d_prev / ||d_prev||**2``; the spectral
    coefficient multiplying ``-F_k`` is kept only when it falls inside
    ``[theta_lo, theta_hi]``, otherwise the rule falls back to ``-F_k``
    plus a shrunk previous direction.
    """
    if state.k == 0:
        return -np.asarray(F_k, dtype=float)
    F_k, d_prev, y = _history(F_k, state)
    nd = np.linalg.norm(d_prev)
    if nd == 0.0:
        raise RuntimeError("previous direction has zero norm")
    nF = np.linalg.norm(F_k)
    if nF == 0.0:
        # The caller should have stopped; return the zero direction rather
        # than dividing by ||F_k||.
        return -F_k
    ny = np.linalg.norm(y)
    Fd = float(F_k @ d_prev)
    Fy = float(F_k @ y)
    dy = float(d_prev @ y)

    tau_k = params.tau * ny / nF + min(0.0, -Fy / nF**2)
    eta = y + tau_k * F_k
    lam_k = ny / nd + max(0.0, -dy / nd**2)
    v = y + lam_k * d_prev
    dv = float(d_prev @ v)

    spectral_term = params.chi * Fd / nd**2
    if dv != 0.0:
        quotient = float(F_k @ eta) / dv - float(eta @ eta) * Fd / dv**2
        beta = max(quotient, spectral_term)
    else:
        # dv vanishes only when y does, in which case Fy == 0 below and the
        # fallback branch is taken anyway.
        beta = spectral_term

    theta = None
    if Fy != 0.0:
        s = np.asarray(x, dtype=float) - state.x_prev
        theta = (float(s @ F_k) + beta * dy) / Fy
    if theta is not None and params.theta_lo <= theta <= params.theta_hi:
        return -theta * F_k + beta * d_prev
    return -F_k + params.zeta_dir * (nF / nd) * d_prev


def _curvature_floor(F_prev, d_prev, y, mu: float) -> float:
    nd = np.linalg.norm(d_prev)
    ny = np.linalg.norm(y)
    tau_k = max(mu * nd * ny, float(d_prev @ y), float(F_prev @ F_prev))
    if tau_k <= 0.0:
        raise RuntimeError(
            "degenerate direction history (zero previous residual and no "
            "curvature); the solver should have stopped"
        )
    return tau_k


def direction_httcgp(F_k, x, state, params: HttcgpParams) -> np.ndarray:
    """Hybrid three-term direction.

    Combines ``-F_k`` with the previous direction and the residual
    difference ``y``; the shared denominator is floored by
    ``max(mu * ||d|| * ||y||, d.y, ||F_prev||**2)`` so it stays positive
    whenever the previous residual was nonzero.  When ``y == 0`` the rule
    reduces to ``-F_k`` exactly.
    """
    if state.k == 0:
        return -np.asarray(F_k, dtype=float)
    F_k, d_prev, y = _history(F_k, state)
    tau_k = _curvature_floor(state.F_prev, d_prev, y, params.mu)
    Fd = float(F_k @ d_prev)
    Fy = float(F_k @ y)
    ny2 = float(y @ y)
    beta = Fy / tau_k - ny2 * Fd / tau_k**2
    upsilon = params.delta * Fd / tau_k
    return -F_k + beta * d_prev + upsilon * y


def direction_msttcgp(F_k, x, state, params: MsttcgpParams) -> np.ndarray:
    """Modified spectral three-term direction.

    Both correction coefficients share the floored denominator of the
    hybrid rule; the spectral coefficient multiplying ``-F_k`` is kept
    only inside ``[theta_lo, theta_hi]`` and is replaced by 1 otherwise
    (the two correction terms are kept in both branches).
    """
    if state.k == 0:
        return -np.asarray(F_k, dtype=float)
    F_k, d_prev, y = _history(F_k, state)
    tau_k = _curvature_floor(state.F_prev, d_prev, y, params.mu)
    Fd = float(F_k @ d_prev)
    Fy = float(F_k @ y)
    ny2 = float(y @ y)
    beta = Fy / tau_k
    upsilon = Fd / tau_k

    theta = None
    if Fy != 0.0:
        s = np.asarray(x, dtype=float) - state.x_prev
        theta = (float(s @ F_k) + beta * float(d_prev @ y) - upsilon * ny2) / Fy
    if theta is not None and params.theta_lo <= theta <= params.theta_hi:
        return -theta * F_k + beta * d_prev - upsilon * y
    return -F_k + beta * d_prev - upsilon * y
