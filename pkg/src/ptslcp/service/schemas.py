"""Request/response models of the solver service.

The problem payload mirrors the on-disk JSON format exactly: n, row-major
M of length n*n, q of length n, optional strictly feasible start x0/s0.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, model_validator

Direction = Literal["ut", "ac"]


class ProblemPayload(BaseModel):
    n: int = Field(ge=1)
    M: list[float]
    q: list[float]
    x0: list[float] | None = None
    s0: list[float] | None = None

    @model_validator(mode="after")
    def _check_lengths(self):
        if len(self.M) != self.n * self.n:
            raise ValueError(f"M must have n*n = {self.n * self.n} entries")
        if len(self.q) != self.n:
            raise ValueError(f"q must have n = {self.n} entries")
        if (self.x0 is None) != (self.s0 is None):
            raise ValueError("x0 and s0 must be given together")
        for name, arr in (("x0", self.x0), ("s0", self.s0)):
            if arr is not None and len(arr) != self.n:
                raise ValueError(f"{name} must have n = {self.n} entries")
        return self


class SolveOptions(BaseModel):
    beta: float = 0.25
    tau: float | Literal["theory"] = 1.5
    eps: float = 1e-7
    direction: Direction = "ac"
    audit: bool = False
    max_outer: int | None = None
    include_trace: bool = False
    include_diagnostics: bool = False


class HealthResponse(BaseModel):
    status: str
    version: str


class GenerateRequest(BaseModel):
    n: int = Field(ge=2)
    eta: float = Field(default=10.0, ge=0.0)
    seed: int = 0


class GenerateResponse(BaseModel):
    problem: ProblemPayload


class SolveRequest(BaseModel):
    problem: ProblemPayload
    options: SolveOptions = SolveOptions()


class IterationRecord(BaseModel):
    index: int
    alpha_p: float
    corrector_steps: int
    v0: float
    xts: float
    psi_after_pred: float
    delta_after_corr: float
    mu_star: float


class DiagnosticsPayload(BaseModel):
    """Local-structure report; scalar fields are null when degenerate."""

    partition_b: list[int]
    m: int
    sigma: float | None
    kappa: float | None
    nu_d: float | None
    nu_a: float | None
    tail_threshold: float | None
    quad_tail: list[tuple[float, float]]
    partition_stable: bool
    degenerate: bool = False


class SolveResponse(BaseModel):
    status: str
    x: list[float] | None
    s: list[float] | None
    predictors: int
    correctors: int
    final_v0: float
    final_xts: float
    wall_ms: float
    trace: list[IterationRecord] | None = None
    diagnostics: DiagnosticsPayload | None = None


class BatchRequest(BaseModel):
    sizes: list[int]
    instances: int = Field(default=25, ge=1)
    eta: float = Field(default=10.0, ge=0.0)
    base_seed: int = 0
    beta: float = 0.25
    tau: float | Literal["theory"] = 1.5
    eps: float = 1e-7
    direction: Literal["ut", "ac", "both"] = "ac"
    audit: bool = False


class InstanceRow(BaseModel):
    """Nulls in final_xts/final_v0 mark a failure with no usable trace."""

    n: int
    seed: int
    direction: Direction
    predictors: int
    correctors: int
    final_xts: float | None
    final_v0: float | None
    status: str
    wall_ms: float


class SummaryRow(BaseModel):
    n: int
    direction: Direction
    instances: int
    converged: int
    mean_predictors: float | None
    mean_correctors: float | None
    mean_wall_ms: float | None


class BatchResponse(BaseModel):
    all_converged: bool
    summaries: list[SummaryRow]
    rows: list[InstanceRow]


class TraceRequest(BaseModel):
    n: int = Field(ge=2)
    seed: int = 0
    eta: float = Field(default=10.0, ge=0.0)
    direction: Direction = "ac"
    eps: float = 1e-7
    beta: float = 0.25
    tau: float | Literal["theory"] = 1.5


class TraceRowPayload(BaseModel):
    exponent: int
    predictors: int
    correctors: int


class TraceResponse(BaseModel):
    n: int
    seed: int
    direction: Direction
    eps: float
    initial_xts: float
    initial_exponent: int
    rows: list[TraceRowPayload]
    converged: bool
    final_xts: float
    predictors: int
    correctors: int
    diagnostics: DiagnosticsPayload | None = None


class ErrorBody(BaseModel):
    error: str
    detail: str
