"""Benchmark orchestration: repeated solves, aggregation, profiles, output.

An experiment fixes a problem selector, a list of solver tags, a repeat
count, and a master seed; starting points are derived per (problem,
dimension, repeat) so that every solver sees the same starts and the
comparison between plain and accelerated variants is paired.  Aggregates
are means over the successful runs only, with the failure count reported
alongside; identical experiment specs reproduce identical rows except for
the wall-clock column.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .anderson import AaParams, solve_aa_dfpm
from .directions import HttcgpParams, MsttcgpParams, ScgpParams
from .linesearch import LineSearchParams
from .problems import LogisticProblem, load_libsvm, make_problem, synth_dataset
from .solver import ProblemDef, SolverConfig, solve_dfpm

__all__ = [
    "SOLVER_TAGS",
    "ExperimentSpec",
    "ResultRow",
    "build_solver",
    "run_experiment",
    "performance_profile",
    "emit",
]

_DIRECTION_CLASSES = {
    "scgp": ScgpParams,
    "httcgp": HttcgpParams,
    "msttcgp": MsttcgpParams,
}
SOLVER_TAGS = tuple(
    base for name in _DIRECTION_CLASSES for base in (name, f"aa-{name}")
)

_PROBLEM_CODES = {"P1": 1, "P2": 2, "P3": 3, "P4": 4, "logistic": 5}

_LS_KEYS = {"gamma", "rho", "sigma", "t1", "t2", "max_backtracks"}
_AA_KEYS = {"m", "c", "b", "lambda", "decay_eps"}
_DIR_KEYS = {
    f.name for cls in _DIRECTION_CLASSES.values() for f in dataclasses.fields(cls)
}
_INT_KEYS = {"ls.max_backtracks", "aa.m"}


@dataclass(frozen=True, eq=False)
class ExperimentSpec:
    """What to run: problem selector, solvers, repeats, seed, overrides.

    ``problem`` is one of "1".."4" (with ``dims`` listing the dimensions to
    sweep) or "logistic" (with either ``dataset_path`` pointing at a LIBSVM
    file or ``synth=(M, n)`` for generated data).  ``overrides`` holds
    dotted configuration keys such as ``ls.sigma``, ``dir.mu``, ``aa.m``,
    ``solver.zeta``, or ``logistic.tau_reg``.
    """

    problem: str
    solvers: tuple[str, ...]
    dims: tuple[int, ...] = ()
    repeats: int = 10
    seed: int = 0
    tol: float = 1e-6
    max_iter: int = 2000
    overrides: Mapping[str, float] = field(default_factory=dict)
    dataset_path: str | None = None
    synth: tuple[int, int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(n) for n in self.dims))
        object.__setattr__(self, "solvers", tuple(self.solvers))
        if self.synth is not None:
            object.__setattr__(self, "synth", tuple(int(v) for v in self.synth))
        if self.problem not in ("1", "2", "3", "4", "logistic"):
            raise ValueError(f"unknown problem selector {self.problem!r}")
        if self.problem == "logistic":
            if (self.dataset_path is None) == (self.synth is None):
                raise ValueError(
                    "logistic runs need exactly one of dataset_path or synth"
                )
        elif not self.dims:
            raise ValueError("numbered problems need at least one dimension")
        if not self.solvers:
            raise ValueError("need at least one solver tag")
        for tag in self.solvers:
            if tag not in SOLVER_TAGS:
                raise ValueError(f"unknown solver tag {tag!r}")
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")
        _validate_override_keys(self.overrides)


@dataclass(frozen=True)
class ResultRow:
    """One aggregated (problem instance, solver) cell of an experiment."""

    problem: str
    n: int
    solver: str
    mean_iter: float
    mean_nf: float
    mean_tcpu_seconds: float
    mean_final_residual: float
    mean_aa_steps: float
    failures: int


def _validate_override_keys(overrides: Mapping[str, float]) -> None:
    for key in overrides:
        group, _, name = key.partition(".")
        known = (
            (group == "ls" and name in _LS_KEYS)
            or (group == "aa" and name in _AA_KEYS)
            or (group == "dir" and name in _DIR_KEYS)
            or key in ("solver.zeta", "logistic.tau_reg")
        )
        if not known:
            raise ValueError(f"unknown configuration override {key!r}")


def _group(overrides: Mapping[str, float], prefix: str) -> dict[str, float]:
    out = {}
    for key, value in overrides.items():
        group, _, name = key.partition(".")
        if group == prefix:
            dotted = f"{prefix}.{name}"
            out[name] = int(value) if dotted in _INT_KEYS else float(value)
    return out


def build_solver(
    tag: str,
    tol: float = 1e-6,
    max_iter: int = 2000,
    overrides: Mapping[str, float] | None = None,
    record_trace: bool = False,
) -> tuple[SolverConfig, AaParams | None]:
    """Translate a solver tag plus dotted overrides into configuration.

    Returns the solver configuration and, for ``aa-`` tags, the
    acceleration parameters (``None`` for plain tags).  Direction overrides
    not applicable to the tag's rule are ignored so that one override set
    can serve a mixed solver list.
    """
    overrides = overrides or {}
    _validate_override_keys(overrides)
    base = tag.removeprefix("aa-")
    if base not in _DIRECTION_CLASSES or tag not in SOLVER_TAGS:
        raise ValueError(f"unknown solver tag {tag!r}")
    dir_cls = _DIRECTION_CLASSES[base]
    dir_fields = {f.name for f in dataclasses.fields(dir_cls)}
    dir_kwargs = {
        name: value
        for name, value in _group(overrides, "dir").items()
        if name in dir_fields
    }
    ls_kwargs = _group(overrides, "ls")
    config = SolverConfig(
        direction=dir_cls(**dir_kwargs),
        line_search=LineSearchParams(**ls_kwargs),
        zeta=float(overrides.get("solver.zeta", 1.7)),
        epsilon=tol,
        max_iter=max_iter,
        record_trace=record_trace,
    )
    if not tag.startswith("aa-"):
        return config, None
    aa_kwargs = _group(overrides, "aa")
    if "lambda" in aa_kwargs:
        aa_kwargs["lam"] = aa_kwargs.pop("lambda")
    return config, AaParams(**aa_kwargs)


def _instances(spec: ExperimentSpec) -> list[ProblemDef]:
    if spec.problem == "logistic":
        tau_reg = float(spec.overrides.get("logistic.tau_reg", 0.01))
        if spec.dataset_path is not None:
            data = load_libsvm(spec.dataset_path)
        else:
            M, n = spec.synth
            data = synth_dataset(M, n, seed=spec.seed)
        return [LogisticProblem(data, tau_reg=tau_reg).to_problem_def()]
    pid = int(spec.problem)
    return [make_problem(pid, n) for n in spec.dims]


def start_point(problem: ProblemDef, master_seed: int, repeat: int) -> np.ndarray:
    """Deterministic start shared by every solver of the same cell.

    Numbered problems start uniformly in the unit cube; the logistic
    problem starts uniformly in [-1, 1]^n.
    """
    code = _PROBLEM_CODES.get(problem.name, 0)
    rng = np.random.default_rng([master_seed, code, problem.dim, repeat])
    if problem.name == "logistic":
        return rng.uniform(-1.0, 1.0, size=problem.dim)
    return rng.uniform(0.0, 1.0, size=problem.dim)


def run_experiment(spec: ExperimentSpec) -> list[ResultRow]:
    """Run the experiment and aggregate one row per (instance, solver)."""
    rows = []
    for problem in _instances(spec):
        starts = [
            start_point(problem, spec.seed, rep) for rep in range(spec.repeats)
        ]
        for tag in spec.solvers:
            config, aa = build_solver(tag, spec.tol, spec.max_iter, spec.overrides)
            reports = []
            for x0 in starts:
                if aa is None:
                    reports.append(solve_dfpm(problem, config, x0))
                else:
                    reports.append(solve_aa_dfpm(problem, config, aa, x0))
            rows.append(_aggregate(problem, tag, reports))
    return rows


def _aggregate(problem: ProblemDef, tag: str, reports) -> ResultRow:
    ok = [r for r in reports if r.converged]

    def mean(metric):
        if not ok:
            return math.nan
        return float(np.mean([metric(r) for r in ok]))

    return ResultRow(
        problem=problem.name,
        n=problem.dim,
        solver=tag,
        mean_iter=mean(lambda r: r.iterations),
        mean_nf=mean(lambda r: r.f_evals),
        mean_tcpu_seconds=mean(lambda r: r.wall_seconds),
        mean_final_residual=mean(lambda r: r.final_residual_norm),
        mean_aa_steps=mean(lambda r: r.aa_steps),
        failures=len(reports) - len(ok),
    )


def _metric_table(rows, metric: str) -> dict[tuple, float]:
    if isinstance(rows, Mapping):
        return {key: float(value) for key, value in rows.items()}
    if metric not in ("iter", "nf"):
        raise ValueError("metric must be 'iter' or 'nf'")
    table = {}
    for row in rows:
        value = row.mean_iter if metric == "iter" else row.mean_nf
        table[((row.problem, row.n), row.solver)] = value
    return table


def performance_profile(rows, metric: str = "iter") -> dict[str, list[tuple[float, float]]]:
    """Ratio-to-best step profile over a set of problem instances.

    ``rows`` is either a list of result rows or a mapping keyed by
    ``(instance, solver)``; failed cells (NaN or infinite values, or cells
    missing entirely) get an infinite ratio.  The result maps each solver
    to its cumulative fraction of instances solved within a factor
    ``theta`` of the per-instance best, evaluated at every breakpoint.
    """
    table = _metric_table(rows, metric)
    solvers = sorted({s for (_, s) in table})
    instances = sorted({i for (i, _) in table}, key=str)
    if len(solvers) < 2:
        raise ValueError("a performance profile needs at least two solvers")
    if not instances:
        raise ValueError("a performance profile needs at least one instance")

    ratios: dict[tuple, float] = {}
    for inst in instances:
        values = {s: table.get((inst, s), math.inf) for s in solvers}
        finite = [v for v in values.values() if math.isfinite(v)]
        best = min(finite) if finite else None
        for s, v in values.items():
            if best is None or not math.isfinite(v):
                ratios[(inst, s)] = math.inf
            elif best == 0.0:
                ratios[(inst, s)] = 1.0 if v == 0.0 else math.inf
            else:
                ratios[(inst, s)] = v / best

    thetas = sorted({r for r in ratios.values() if math.isfinite(r)}) or [1.0]
    count = len(instances)
    return {
        s: [
            (t, sum(ratios[(i, s)] <= t for i in instances) / count)
            for t in thetas
        ]
        for s in solvers
    }


def _g6(value: float) -> str:
    return format(value, ".6g")


def _e2(value: float) -> str:
    return format(value, ".2e")


_ROW_HEADER = (
    "problem",
    "n",
    "solver",
    "mean_iter",
    "mean_nf",
    "mean_tcpu_seconds",
    "mean_final_residual",
    "mean_aa_steps",
    "failures",
)


def _row_cells(row: ResultRow) -> list[str]:
    return [
        row.problem,
        str(row.n),
        row.solver,
        _g6(row.mean_iter),
        _g6(row.mean_nf),
        _g6(row.mean_tcpu_seconds),
        _e2(row.mean_final_residual),
        _g6(row.mean_aa_steps),
        str(row.failures),
    ]


def _json_number(value: float, fmt=_g6):
    if math.isnan(value):
        return None
    return float(fmt(value))


def _row_object(row: ResultRow) -> dict:
    return {
        "problem": row.problem,
        "n": row.n,
        "solver": row.solver,
        "mean_iter": _json_number(row.mean_iter),
        "mean_nf": _json_number(row.mean_nf),
        "mean_tcpu_seconds": _json_number(row.mean_tcpu_seconds),
        "mean_final_residual": _json_number(row.mean_final_residual, _e2),
        "mean_aa_steps": _json_number(row.mean_aa_steps),
        "failures": row.failures,
    }


def emit(obj, format: str = "csv", path=None) -> str:
    """Render rows or a profile as CSV or JSON; write to ``path`` if given.

    Numeric cells use 6 significant digits except residual norms, which use
    scientific notation with 2 decimals; NaN aggregates (all repeats
    failed) render as ``nan`` in CSV and ``null`` in JSON.  Returns the
    rendered text.
    """
    if format not in ("csv", "json"):
        raise ValueError(f"unknown output format {format!r}")
    profile = isinstance(obj, Mapping)
    if format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        if profile:
            writer.writerow(("solver", "theta", "rho"))
            for solver in sorted(obj):
                for theta, rho in obj[solver]:
                    writer.writerow((solver, _g6(theta), _g6(rho)))
        else:
            writer.writerow(_ROW_HEADER)
            for row in obj:
                writer.writerow(_row_cells(row))
        text = buffer.getvalue()
    else:
        if profile:
            payload = [
                {"solver": solver, "theta": _json_number(theta), "rho": _json_number(rho)}
                for solver in sorted(obj)
                for theta, rho in obj[solver]
            ]
        else:
            payload = [_row_object(row) for row in obj]
        text = json.dumps(payload, indent=2) + "\n"
    if path is not None:
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
    return text
