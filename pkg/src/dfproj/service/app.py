"""FastAPI application exposing the solvers and the benchmark runner.

The endpoints wrap the core package directly; the CLI talks to them either
in process or over HTTP.  Domain validation errors (unknown tags, bad
overrides, missing datasets) surface as 400 responses with the original
message.
"""

from __future__ import annotations

import math

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..anderson import solve_aa_dfpm
from ..bench import (
    ExperimentSpec,
    ResultRow,
    build_solver,
    performance_profile,
    run_experiment,
    start_point,
)
from ..problems import LogisticProblem, load_libsvm, make_problem, synth_dataset
from .schemas import (
    ExperimentRequest,
    ExperimentResponse,
    HealthResponse,
    ProblemSelector,
    ProfilePoint,
    ProfileRequest,
    ProfileResponse,
    ResultRowModel,
    SolveRequest,
    SolveResponse,
)
from ..solver import solve_dfpm

app = FastAPI(
    title="dfproj benchmark service",
    description=(
        "Derivative-free projection solvers for constrained monotone "
        "equations, with Anderson acceleration"
    ),
    version=__version__,
)


def _problem_from_selector(selector: ProblemSelector):
    if selector.problem == "logistic":
        if (selector.dataset_path is None) == (selector.synth is None):
            raise ValueError("logistic runs need exactly one of dataset_path or synth")
        if selector.dataset_path is not None:
            data = load_libsvm(selector.dataset_path)
        else:
            s = selector.synth
            data = synth_dataset(s.m, s.n, seed=s.seed)
        return LogisticProblem(data, tau_reg=selector.tau_reg).to_problem_def()
    if selector.n is None:
        raise ValueError("numbered problems need a dimension n")
    return make_problem(int(selector.problem), selector.n)


def _clean(value: float) -> float | None:
    return None if math.isnan(value) else value


def _row_model(row: ResultRow) -> ResultRowModel:
    return ResultRowModel(
        problem=row.problem,
        n=row.n,
        solver=row.solver,
        mean_iter=_clean(row.mean_iter),
        mean_nf=_clean(row.mean_nf),
        mean_tcpu_seconds=_clean(row.mean_tcpu_seconds),
        mean_final_residual=_clean(row.mean_final_residual),
        mean_aa_steps=_clean(row.mean_aa_steps),
        failures=row.failures,
    )


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/solve", response_model=SolveResponse)
def solve(request: SolveRequest) -> SolveResponse:
    try:
        problem = _problem_from_selector(request.problem)
        config, aa = build_solver(
            request.solver, request.tol, request.max_iter, request.overrides
        )
        if request.x0 is not None:
            x0 = request.x0
            if len(x0) != problem.dim:
                raise ValueError("x0 length does not match the problem dimension")
        else:
            x0 = start_point(problem, request.seed, 0)
        if aa is None:
            report = solve_dfpm(problem, config, x0)
        else:
            report = solve_aa_dfpm(problem, config, aa, x0)
    except (ValueError, OSError) as err:
        raise HTTPException(status_code=400, detail=str(err)) from err
    return SolveResponse(
        status=report.status.value,
        iterations=report.iterations,
        f_evals=report.f_evals,
        wall_seconds=report.wall_seconds,
        final_residual_norm=report.final_residual_norm,
        aa_steps=report.aa_steps,
        x=list(map(float, report.x)) if request.include_solution else None,
    )


@app.post("/experiments", response_model=ExperimentResponse)
def experiments(request: ExperimentRequest) -> ExperimentResponse:
    try:
        spec = ExperimentSpec(
            problem=request.problem,
            solvers=tuple(request.solvers),
            dims=tuple(request.dims),
            repeats=request.repeats,
            seed=request.seed,
            tol=request.tol,
            max_iter=request.max_iter,
            overrides=request.overrides,
            dataset_path=request.dataset_path,
            synth=(request.synth.m, request.synth.n) if request.synth else None,
        )
        rows = run_experiment(spec)
    except (ValueError, OSError) as err:
        raise HTTPException(status_code=400, detail=str(err)) from err
    return ExperimentResponse(
        rows=[_row_model(row) for row in rows],
        all_converged=all(row.failures == 0 for row in rows),
    )


@app.post("/profiles", response_model=ProfileResponse)
def profiles(request: ProfileRequest) -> ProfileResponse:
    table = {}
    for row in request.rows:
        value = row.mean_iter if request.metric == "iter" else row.mean_nf
        table[((row.problem, row.n), row.solver)] = (
            math.nan if value is None else value
        )
    try:
        profile = performance_profile(table, request.metric)
    except ValueError as err:
        raise HTTPException(status_code=400, detail=str(err)) from err
    points = [
        ProfilePoint(solver=solver, theta=theta, rho=rho)
        for solver in sorted(profile)
        for theta, rho in profile[solver]
    ]
    return ProfileResponse(points=points)
