"""Feasible sets with closed-form Euclidean projections, plus scalar clamping.

The solvers only ever project onto the nonnegative orthant, axis-aligned
boxes, or the whole space, so this is a closed enumeration rather than a
plug-in interface: every projection is exact and cheap, which is what the
hyperplane-projection step relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "FeasibleSet",
    "NonnegativeOrthant",
    "Box",
    "WholeSpace",
    "clamp_scalar",
]


def _as_point(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-d point, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point has non-finite entries")
    return x


class FeasibleSet:
    """Common interface of the built-in closed convex sets."""

    def project(self, x) -> np.ndarray:
        """Return the Euclidean projection of ``x`` onto the set."""
        raise NotImplementedError

    def contains(self, x, tol: float = 0.0) -> bool:
        """Whether ``x`` lies in the set, up to a componentwise slack ``tol``."""
        raise NotImplementedError


@dataclass(frozen=True)
class NonnegativeOrthant(FeasibleSet):
    """The set of componentwise nonnegative vectors, any dimension."""

    def project(self, x):
        return np.maximum(_as_point(x), 0.0)

    def contains(self, x, tol: float = 0.0) -> bool:
        return bool(np.all(_as_point(x) >= -tol))


@dataclass(frozen=True, eq=False)
class Box(FeasibleSet):
    """Axis-aligned box { x : lower <= x <= upper } with finite or infinite bounds."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError("box bounds must be 1-d arrays of equal length")
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)):
            raise ValueError("box bounds must not contain NaN")
        if np.any(lower > upper):
            raise ValueError("box requires lower <= upper componentwise")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    def _check_dim(self, x):
        if x.shape != self.lower.shape:
            raise ValueError(
                f"point of dimension {x.shape[0]} does not match box of "
                f"dimension {self.lower.shape[0]}"
            )

    def project(self, x):
        x = _as_point(x)
        self._check_dim(x)
        return np.clip(x, self.lower, self.upper)

    def contains(self, x, tol: float = 0.0) -> bool:
        x = _as_point(x)
        self._check_dim(x)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))


@dataclass(frozen=True)
class WholeSpace(FeasibleSet):
    """Unconstrained case: projection is the identity."""

    def project(self, x):
        return _as_point(x).copy()

    def contains(self, x, tol: float = 0.0) -> bool:
        _as_point(x)
        return True


def clamp_scalar(s: float, t1: float, t2: float) -> float:
    """Clamp the scalar ``s`` into the interval [t1, t2].

    Requires 0 <= t1 <= t2; used by the line search to pin the residual
    norm factor away from zero and from excessive size.
    """
    if not 0.0 <= t1 <= t2:
        raise ValueError(f"need 0 <= t1 <= t2, got t1={t1}, t2={t2}")
    s = float(s)
    return min(max(s, t1), t2)
