"""Request and response models of the benchmark service.

Requests reference problems by selector (id plus dimension, or a dataset
path / synthetic shape for the logistic problem) rather than shipping
vectors over the wire; responses carry solve reports and aggregated rows
in the same field layout the offline emitters use.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

ProblemId = Literal["1", "2", "3", "4", "logistic"]


class SynthSpec(BaseModel):
    """Shape of a generated logistic dataset."""

    m: int = Field(ge=1, description="number of samples")
    n: int = Field(ge=1, description="number of features")
    seed: int = 0


class ProblemSelector(BaseModel):
    problem: ProblemId
    n: int | None = Field(default=None, ge=1, description="dimension (numbered problems)")
    dataset_path: str | None = None
    synth: SynthSpec | None = None
    tau_reg: float = Field(default=0.01, gt=0.0)


class SolveRequest(BaseModel):
    problem: ProblemSelector
    solver: str = Field(description="solver tag, e.g. 'httcgp' or 'aa-httcgp'")
    tol: float = Field(default=1e-6, gt=0.0)
    max_iter: int = Field(default=2000, ge=1)
    seed: int = 0
    x0: list[float] | None = Field(
        default=None, description="explicit start; overrides the seeded one"
    )
    overrides: dict[str, float] = Field(default_factory=dict)
    include_solution: bool = True


class SolveResponse(BaseModel):
    status: str
    iterations: int
    f_evals: int
    wall_seconds: float
    final_residual_norm: float
    aa_steps: int
    x: list[float] | None = None


class ExperimentRequest(BaseModel):
    problem: ProblemId
    dims: list[int] = Field(default_factory=list)
    dataset_path: str | None = None
    synth: SynthSpec | None = None
    solvers: list[str]
    repeats: int = Field(default=10, ge=1)
    seed: int = 0
    tol: float = Field(default=1e-6, gt=0.0)
    max_iter: int = Field(default=2000, ge=1)
    overrides: dict[str, float] = Field(default_factory=dict)


class ResultRowModel(BaseModel):
    problem: str
    n: int
    solver: str
    mean_iter: float | None
    mean_nf: float | None
    mean_tcpu_seconds: float | None
    mean_final_residual: float | None
    mean_aa_steps: float | None
    failures: int


class ExperimentResponse(BaseModel):
    rows: list[ResultRowModel]
    all_converged: bool


class ProfileRequest(BaseModel):
    rows: list[ResultRowModel]
    metric: Literal["iter", "nf"] = "iter"


class ProfilePoint(BaseModel):
    solver: str
    theta: float
    rho: float


class ProfileResponse(BaseModel):
    points: list[ProfilePoint]


class HealthResponse(BaseModel):
    status: str
    version: str
