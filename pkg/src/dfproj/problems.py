"""Benchmark residual maps, the regularized logistic gradient, and LIBSVM IO.

The numbered test problems are classic separable monotone maps over the
nonnegative orthant; the logistic problem turns an l2-regularized logistic
regression dataset into an unconstrained strongly monotone residual (the
loss gradient).  Datasets are stored sparse with 0-based column indices in
memory and 1-based indices in file form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse
from scipy.special import expit

from .geometry import NonnegativeOrthant, WholeSpace
from .solver import ProblemDef

__all__ = [
    "make_problem",
    "Dataset",
    "LogisticProblem",
    "parse_libsvm",
    "serialize_libsvm",
    "load_libsvm",
    "synth_dataset",
]

PROBLEM_IDS = (1, 2, 3, 4)


def make_problem(pid: int, n: int) -> ProblemDef:
    """Build one of the numbered benchmark problems at dimension ``n``.

    All four use the nonnegative orthant as feasible set:

    1. componentwise ``exp(x_i) - 1`` (solution at the origin);
    2. componentwise ``log(x_i + 1) - x_i / n`` (monotone near the orthant
       floor; no closed-form solution recorded);
    3. ``exp(x_1) - 1`` in the first component, ``exp(x_i) + x_i - 1`` in
       the rest (solution at the origin);
    4. componentwise ``2 x_i - sin(x_i)``, globally Lipschitz (constant 3)
       and strongly monotone (modulus 1), solution at the origin.
    """
    if pid not in PROBLEM_IDS:
        raise ValueError(f"unknown problem id {pid!r}; expected one of {PROBLEM_IDS}")
    if n < 1:
        raise ValueError("dimension must be at least 1")
    orthant = NonnegativeOrthant()
    zero = np.zeros(n)

    if pid == 1:
        return ProblemDef(
            dim=n,
            F=lambda x: np.expm1(x),
            feasible=orthant,
            known_solution=zero,
            name="P1",
        )
    if pid == 2:
        inv_n = 1.0 / n
        return ProblemDef(
            dim=n,
            F=lambda x: np.log1p(x) - inv_n * x,
            feasible=orthant,
            name="P2",
        )
    if pid == 3:

        def F3(x):
            out = np.expm1(x) + x
            out[0] -= x[0]
            return out

        return ProblemDef(dim=n, F=F3, feasible=orthant, known_solution=zero, name="P3")

    def F4(x):
        return 2.0 * x - np.sin(x)

    return ProblemDef(
        dim=n,
        F=F4,
        feasible=orthant,
        known_solution=zero,
        lipschitz=3.0,
        strong_monotone_mu=1.0,
        name="P4",
    )


@dataclass(frozen=True, eq=False)
class Dataset:
    """A binary classification dataset: sparse rows and +/-1 labels."""

    features: scipy.sparse.csr_matrix
    labels: np.ndarray

    def __post_init__(self):
        features = scipy.sparse.csr_matrix(self.features)
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or features.shape[0] != labels.shape[0]:
            raise ValueError("label count does not match the number of rows")
        if not np.all(np.isin(labels, (-1, 1))):
            raise ValueError("labels must be +1 or -1")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels.astype(np.int8))

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True, eq=False)
class LogisticProblem:
    """l2-regularized logistic regression posed as a monotone residual.

    The residual is the gradient of

        (1/M) * sum_i log(1 + exp(-b_i * a_i . x)) + (tau_reg/2) * ||x||**2

    which is Lipschitz and strongly monotone with modulus ``tau_reg``; the
    feasible set is the whole space.
    """

    data: Dataset
    tau_reg: float = 0.01

    def __post_init__(self):
        if not self.tau_reg > 0.0:
            raise ValueError("regularization weight must be positive")

    def loss(self, x) -> float:
        x = np.asarray(x, dtype=float)
        margins = self.data.labels * (self.data.features @ x)
        data_term = float(np.mean(np.logaddexp(0.0, -margins)))
        return data_term + 0.5 * self.tau_reg * float(x @ x)

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        b = self.data.labels
        margins = b * (self.data.features @ x)
        # d/dm log(1 + exp(-m)) = -expit(-m); expit saturates instead of
        # overflowing for large margins of either sign.
        weights = b * expit(-margins)
        M = self.data.n_samples
        return -(self.data.features.T @ weights) / M + self.tau_reg * x

    def to_problem_def(self, name: str = "logistic") -> ProblemDef:
        return ProblemDef(
            dim=self.data.n_features,
            F=self.gradient,
            feasible=WholeSpace(),
            strong_monotone_mu=self.tau_reg,
            name=name,
        )


_POSITIVE_LABELS = {"+1", "1", "+1.0", "1.0"}
_NEGATIVE_LABELS = {"-1", "0", "-1.0", "0.0"}


def parse_libsvm(source, n_features: int | None = None) -> Dataset:
    """Parse sparse classification data in the plain text LIBSVM layout.

    ``source`` may be a string, bytes, or an iterable of lines.  Each data
    line is ``<label> <index>:<value> ...`` with 1-based, strictly positive
    feature indices; labels ``+1``/``1`` map to +1 and ``-1``/``0`` to -1.
    Blank lines and lines starting with ``#`` are skipped.  The feature
    count is inferred from the largest index seen unless ``n_features``
    is given.  Malformed input raises ``ValueError`` naming the line.
    """
    if isinstance(source, bytes):
        source = source.decode("ascii")
    if isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = [
            line.decode("ascii") if isinstance(line, bytes) else line
            for line in source
        ]

    labels: list[int] = []
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    max_index = 0
    n_rows = 0
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        label_token = tokens[0]
        if label_token in _POSITIVE_LABELS:
            label = 1
        elif label_token in _NEGATIVE_LABELS:
            label = -1
        else:
            raise ValueError(f"line {lineno}: unrecognized label {label_token!r}")
        seen: set[int] = set()
        for token in tokens[1:]:
            idx_str, sep, val_str = token.partition(":")
            if not sep:
                raise ValueError(f"line {lineno}: malformed feature {token!r}")
            try:
                idx = int(idx_str)
                val = float(val_str)
            except ValueError as err:
                raise ValueError(
                    f"line {lineno}: malformed feature {token!r}"
                ) from err
            if idx < 1:
                raise ValueError(f"line {lineno}: feature index {idx} is not >= 1")
            if idx in seen:
                raise ValueError(f"line {lineno}: duplicate feature index {idx}")
            seen.add(idx)
            rows.append(n_rows)
            cols.append(idx - 1)
            vals.append(val)
            max_index = max(max_index, idx)
        labels.append(label)
        n_rows += 1

    if n_rows == 0:
        raise ValueError("no data lines found")
    width = n_features if n_features is not None else max_index
    if width < max_index:
        raise ValueError(
            f"n_features={width} is smaller than the largest index {max_index}"
        )
    features = scipy.sparse.csr_matrix(
        (vals, (rows, cols)), shape=(n_rows, max(width, 1))
    )
    return Dataset(features=features, labels=np.asarray(labels, dtype=np.int8))


def serialize_libsvm(dataset: Dataset) -> str:
    """Render a dataset back into LIBSVM text (1-based indices).

    Values are written with ``repr`` precision so that a parse round-trip
    reproduces the dataset exactly.
    """
    out = []
    coo = dataset.features.tocoo()
    per_row: list[list[tuple[int, float]]] = [[] for _ in range(dataset.n_samples)]
    for i, j, v in zip(coo.row, coo.col, coo.data):
        per_row[i].append((int(j) + 1, float(v)))
    for label, entries in zip(dataset.labels, per_row):
        entries.sort()
        parts = ["+1" if label > 0 else "-1"]
        parts.extend(f"{idx}:{val!r}" for idx, val in entries)
        out.append(" ".join(parts))
    return "\n".join(out) + "\n"


def load_libsvm(path, n_features: int | None = None) -> Dataset:
    with open(path, "rb") as fh:
        return parse_libsvm(fh.read(), n_features=n_features)


def synth_dataset(M: int, n: int, seed: int = 0) -> Dataset:
    """Deterministic synthetic classification data for smoke benchmarks.

    Features are uniform on [-1, 1]; labels are drawn from a logistic
    model with a standard normal ground-truth weight vector.
    """
    if M < 1 or n < 1:
        raise ValueError("need at least one sample and one feature")
    rng = np.random.default_rng(seed)
    w = rng.normal(size=n)
    A = rng.uniform(-1.0, 1.0, size=(M, n))
    prob = expit(A @ w)
    labels = np.where(rng.uniform(size=M) < prob, 1, -1).astype(np.int8)
    return Dataset(features=scipy.sparse.csr_matrix(A), labels=labels)
