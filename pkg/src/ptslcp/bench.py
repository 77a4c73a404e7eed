"""Benchmark batches and accuracy traces over generated instances.

A batch solves `instances` random instances per size, per predictor
direction; instance k uses seed base_seed + k, and both directions see
the identical instance. Means are taken over converged instances only.
Output rows are deterministic for a given spec except for wall_ms.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from .directions import DirectionKind
from .errors import PtsLcpError, SingularBlock
from .problem import GeneratorConfig, generate_random
from .solver import (LocalDiagnostics, SolveTrace, SolverConfig, Termination,
                     local_diagnostics, solve)

CSV_HEADER = ("n,seed,direction,predictors,correctors,"
              "final_xts,final_v0,status,wall_ms")

_STATUS = {
    Termination.CONVERGED: "converged",
    Termination.BUDGET_EXCEEDED: "budget_exceeded",
    Termination.NUMERICAL_FAILURE: "numerical_failure",
}


def direction_label(kind: DirectionKind) -> str:
    return kind.value


def parse_direction(label: str) -> DirectionKind:
    for kind in (DirectionKind.UNIVERSAL_TANGENT,
                 DirectionKind.AUTO_CORRECTOR):
        if label == kind.value:
            return kind
    raise ValueError(f"unknown direction {label!r} (expected 'ut' or 'ac')")


@dataclass(frozen=True)
class BatchSpec:
    """What to run: sizes x instances x directions with one config."""

    sizes: tuple[int, ...]
    instances: int = 25
    eta: float = 10.0
    base_seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)
    directions: tuple[DirectionKind, ...] = (DirectionKind.AUTO_CORRECTOR,)

    def __post_init__(self):
        if not self.sizes or any(n < 2 for n in self.sizes):
            raise ValueError(f"sizes must be >= 2, got {self.sizes}")
        if self.instances < 1:
            raise ValueError(f"instances must be >= 1, got {self.instances}")
        if not self.directions:
            raise ValueError("at least one direction is required")


@dataclass(frozen=True)
class InstanceResult:
    """One (instance, direction) solve outcome."""

    n: int
    seed: int
    direction: str
    predictors: int
    correctors: int
    final_xts: float
    final_v0: float
    status: str
    wall_ms: float


@dataclass(frozen=True)
class DirectionSummary:
    """Converged-only means for one (size, direction) cell."""

    n: int
    direction: str
    instances: int
    converged: int
    mean_predictors: float
    mean_correctors: float
    mean_wall_ms: float


@dataclass(frozen=True)
class BenchReport:
    spec: BatchSpec
    rows: tuple[InstanceResult, ...]
    summaries: tuple[DirectionSummary, ...]

    @property
    def all_converged(self) -> bool:
        return all(row.status == "converged" for row in self.rows)


def _solve_instance(n: int, seed: int, eta: float,
                    cfg: SolverConfig) -> InstanceResult:
    problem, start = generate_random(GeneratorConfig(n=n, eta=eta, seed=seed))
    begin = time.perf_counter()
    try:
        x, s, trace = solve(problem, start, cfg)
        final_xts = float(x @ s)
        final_v0 = trace.records[-1].v0 if trace.records else trace.v0_initial
        status = _STATUS[Termination.CONVERGED]
        predictors, correctors = trace.predictor_count, trace.corrector_count
    except PtsLcpError as exc:
        trace = getattr(exc, "trace", None)
        if trace is not None:
            predictors, correctors = trace.predictor_count, trace.corrector_count
            final_v0 = trace.records[-1].v0 if trace.records else trace.v0_initial
            final_xts = trace.records[-1].xts if trace.records else trace.xts_initial
            status = _STATUS.get(trace.termination,
                                 _STATUS[Termination.NUMERICAL_FAILURE])
        else:
            predictors = correctors = 0
            final_v0 = final_xts = math.nan
            status = _STATUS[Termination.NUMERICAL_FAILURE]
    wall_ms = (time.perf_counter() - begin) * 1000.0
    return InstanceResult(n=n, seed=seed, direction=direction_label(cfg.direction),
                          predictors=predictors, correctors=correctors,
                          final_xts=final_xts, final_v0=final_v0,
                          status=status, wall_ms=wall_ms)


def run_batch(spec: BatchSpec) -> BenchReport:
    """Solve the whole grid; never aborts on a per-instance failure."""
    rows: list[InstanceResult] = []
    summaries: list[DirectionSummary] = []
    for n in spec.sizes:
        for kind in spec.directions:
            cfg = SolverConfig(beta=spec.solver.beta, tau=spec.solver.tau,
                               eps=spec.solver.eps, direction=kind,
                               max_outer=spec.solver.max_outer,
                               audit=spec.solver.audit)
            cell: list[InstanceResult] = []
            for k in range(spec.instances):
                cell.append(_solve_instance(n, spec.base_seed + k,
                                            spec.eta, cfg))
            rows.extend(cell)
            ok = [row for row in cell if row.status == "converged"]
            count = len(ok)
            summaries.append(DirectionSummary(
                n=n, direction=direction_label(kind),
                instances=spec.instances, converged=count,
                mean_predictors=(sum(r.predictors for r in ok) / count
                                 if count else math.nan),
                mean_correctors=(sum(r.correctors for r in ok) / count
                                 if count else math.nan),
                mean_wall_ms=(sum(r.wall_ms for r in ok) / count
                              if count else math.nan),
            ))
    return BenchReport(spec=spec, rows=tuple(rows), summaries=tuple(summaries))


def csv_rows(report: BenchReport) -> list[str]:
    """CSV lines (header first); floats use shortest round-trip form."""
    lines = [CSV_HEADER]
    for row in report.rows:
        lines.append(
            f"{row.n},{row.seed},{row.direction},{row.predictors},"
            f"{row.correctors},{row.final_xts!r},{row.final_v0!r},"
            f"{row.status},{row.wall_ms:.3f}")
    return lines


@dataclass(frozen=True)
class TraceRow:
    """Cumulative counts when x^T s first dropped below 10**exponent."""

    exponent: int
    predictors: int
    correctors: int


@dataclass(frozen=True)
class AccuracyTrace:
    """Decade-by-decade progress of one instance."""

    n: int
    seed: int
    direction: str
    eps: float
    initial_xts: float
    initial_exponent: int
    rows: tuple[TraceRow, ...]
    converged: bool
    final_xts: float
    predictors: int
    correctors: int
    diagnostics: LocalDiagnostics | None
    degenerate_partition: bool


def accuracy_rows(trace: SolveTrace) -> tuple[int, tuple[TraceRow, ...]]:
    """Decade crossings of x^T s over the outer-iteration records."""
    start_exp = int(math.floor(math.log10(trace.xts_initial)))
    floor_exp = int(math.floor(math.log10(trace.eps))) - 12
    rows: list[TraceRow] = []
    next_exp = start_exp
    correctors = 0
    for k, rec in enumerate(trace.records, start=1):
        correctors += rec.corrector_steps
        while next_exp >= floor_exp and rec.xts < 10.0 ** next_exp:
            rows.append(TraceRow(exponent=next_exp, predictors=k,
                                 correctors=correctors))
            next_exp -= 1
    return start_exp, tuple(rows)


def run_trace(n: int, seed: int, direction: DirectionKind, eps: float, *,
              eta: float = 10.0, beta: float = 0.25,
              tau: float | None = 1.5, audit: bool = False,
              with_diagnostics: bool = True) -> AccuracyTrace:
    """Solve one instance and report its decade-crossing trace."""
    problem, start = generate_random(GeneratorConfig(n=n, eta=eta, seed=seed))
    cfg = SolverConfig(beta=beta, tau=tau, eps=eps, direction=direction,
                       audit=audit)
    diagnostics = None
    degenerate = False
    try:
        x, s, trace = solve(problem, start, cfg)
        converged = True
        final_xts = float(x @ s)
        if with_diagnostics:
            try:
                diagnostics = local_diagnostics(problem, trace, x, s)
            except SingularBlock:
                degenerate = True
    except PtsLcpError as exc:
        trace = getattr(exc, "trace", None)
        if trace is None:
            raise
        converged = False
        final_xts = trace.records[-1].xts if trace.records else trace.xts_initial
    start_exp, rows = accuracy_rows(trace)
    return AccuracyTrace(
        n=n, seed=seed, direction=direction_label(direction), eps=eps,
        initial_xts=trace.xts_initial, initial_exponent=start_exp, rows=rows,
        converged=converged, final_xts=final_xts,
        predictors=trace.predictor_count, correctors=trace.corrector_count,
        diagnostics=diagnostics, degenerate_partition=degenerate)
