"""HTTP facade over the solver, generator, and benchmark runner.

Endpoints are stateless; every request owns its solver state, so
concurrent requests are independent. Input errors map to 422 with a
structured body; solver outcomes (converged / budget / numerical) are
reported in the response status field rather than as HTTP errors.
"""

from __future__ import annotations

import math
import time

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, bench
from ..directions import DirectionKind
from ..errors import PtsLcpError, SingularBlock
from ..problem import FeasiblePair, LcpProblem, GeneratorConfig, generate_random
from ..solver import (LocalDiagnostics, SolverConfig, local_diagnostics,
                      solve, theory_tau)
from . import schemas


def _solver_config(beta: float, tau, eps: float, direction: str,
                   audit: bool, max_outer: int | None = None) -> SolverConfig:
    resolved = None if tau == "theory" else float(tau)
    return SolverConfig(beta=beta, tau=resolved, eps=eps,
                        direction=bench.parse_direction(direction),
                        max_outer=max_outer, audit=audit)


def _problem_from_payload(payload: schemas.ProblemPayload
                          ) -> tuple[LcpProblem, FeasiblePair | None]:
    m = np.asarray(payload.M, dtype=float).reshape(payload.n, payload.n)
    problem = LcpProblem(n=payload.n, M=m, q=np.asarray(payload.q, float))
    start = None
    if payload.x0 is not None:
        start = FeasiblePair(x=np.asarray(payload.x0, float),
                             s=np.asarray(payload.s0, float))
    return problem, start


def _diagnostics_payload(diag: LocalDiagnostics | None, degenerate: bool
                         ) -> schemas.DiagnosticsPayload | None:
    if diag is None and not degenerate:
        return None
    if diag is None:
        return schemas.DiagnosticsPayload(
            partition_b=[], m=0, sigma=None, kappa=None,
            nu_d=None, nu_a=None, tail_threshold=None,
            quad_tail=[], partition_stable=False, degenerate=True)
    return schemas.DiagnosticsPayload(
        partition_b=list(diag.partition_b), m=diag.m, sigma=diag.sigma,
        kappa=diag.kappa, nu_d=diag.nu_d, nu_a=diag.nu_a,
        tail_threshold=diag.tail_threshold,
        quad_tail=[tuple(pair) for pair in diag.quad_tail],
        partition_stable=diag.partition_stable, degenerate=False)


def create_app() -> FastAPI:
    app = FastAPI(title="ptslcp", version=__version__)

    @app.exception_handler(PtsLcpError)
    async def _lcp_error(_request: Request, exc: PtsLcpError):
        body = schemas.ErrorBody(error=type(exc).__name__, detail=str(exc))
        return JSONResponse(status_code=422, content=body.model_dump())

    @app.exception_handler(ValueError)
    async def _value_error(_request: Request, exc: ValueError):
        # Config dataclasses validate with plain ValueError (bad beta/tau
        # combinations, empty size lists); those are client input errors.
        body = schemas.ErrorBody(error="InvalidParameters", detail=str(exc))
        return JSONResponse(status_code=422, content=body.model_dump())

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/problems/generate", response_model=schemas.GenerateResponse)
    def generate(req: schemas.GenerateRequest):
        problem, start = generate_random(
            GeneratorConfig(n=req.n, eta=req.eta, seed=req.seed))
        payload = schemas.ProblemPayload(
            n=problem.n, M=[float(v) for v in problem.M.ravel()],
            q=[float(v) for v in problem.q],
            x0=[float(v) for v in start.x], s0=[float(v) for v in start.s])
        return schemas.GenerateResponse(problem=payload)

    @app.post("/solve", response_model=schemas.SolveResponse)
    def solve_problem(req: schemas.SolveRequest):
        problem, start = _problem_from_payload(req.problem)
        if start is None:
            body = schemas.ErrorBody(
                error="MissingStart",
                detail="problem payload has no x0/s0 starting pair")
            return JSONResponse(status_code=422, content=body.model_dump())
        opts = req.options
        cfg = _solver_config(opts.beta, opts.tau, opts.eps, opts.direction,
                             opts.audit, opts.max_outer)
        begin = time.perf_counter()
        diag_payload = None
        try:
            x, s, trace = solve(problem, start, cfg)
            status = "converged"
            xs_out = ([float(v) for v in x], [float(v) for v in s])
            final_xts = float(x @ s)
            final_v0 = trace.records[-1].v0 if trace.records else trace.v0_initial
            if opts.include_diagnostics:
                try:
                    diag_payload = _diagnostics_payload(
                        local_diagnostics(problem, trace, x, s), False)
                except SingularBlock:
                    diag_payload = _diagnostics_payload(None, True)
        except PtsLcpError as exc:
            trace = getattr(exc, "trace", None)
            if trace is None:
                raise
            status = trace.termination.value
            xs_out = (None, None)
            final_v0 = trace.records[-1].v0 if trace.records else trace.v0_initial
            final_xts = trace.records[-1].xts if trace.records else trace.xts_initial
        wall_ms = (time.perf_counter() - begin) * 1000.0
        rows = None
        if opts.include_trace:
            rows = [schemas.IterationRecord(
                index=rec.index, alpha_p=rec.alpha_p,
                corrector_steps=rec.corrector_steps, v0=rec.v0, xts=rec.xts,
                psi_after_pred=rec.psi_after_pred,
                delta_after_corr=rec.delta_after_corr, mu_star=rec.mu_star)
                for rec in trace.records]
        return schemas.SolveResponse(
            status=status, x=xs_out[0], s=xs_out[1],
            predictors=trace.predictor_count,
            correctors=trace.corrector_count,
            final_v0=final_v0, final_xts=final_xts, wall_ms=wall_ms,
            trace=rows, diagnostics=diag_payload)

    @app.post("/bench/batch", response_model=schemas.BatchResponse)
    def batch(req: schemas.BatchRequest):
        if req.direction == "both":
            kinds = (DirectionKind.AUTO_CORRECTOR,
                     DirectionKind.UNIVERSAL_TANGENT)
        else:
            kinds = (bench.parse_direction(req.direction),)
        spec = bench.BatchSpec(
            sizes=tuple(req.sizes), instances=req.instances, eta=req.eta,
            base_seed=req.base_seed,
            solver=_solver_config(req.beta, req.tau, req.eps, "ac",
                                  req.audit),
            directions=kinds)
        report = bench.run_batch(spec)
        return schemas.BatchResponse(
            all_converged=report.all_converged,
            summaries=[schemas.SummaryRow(
                n=s.n, direction=s.direction, instances=s.instances,
                converged=s.converged,
                mean_predictors=None if math.isnan(s.mean_predictors)
                else s.mean_predictors,
                mean_correctors=None if math.isnan(s.mean_correctors)
                else s.mean_correctors,
                mean_wall_ms=None if math.isnan(s.mean_wall_ms)
                else s.mean_wall_ms) for s in report.summaries],
            rows=[schemas.InstanceRow(
                n=r.n, seed=r.seed, direction=r.direction,
                predictors=r.predictors, correctors=r.correctors,
                final_xts=None if math.isnan(r.final_xts) else r.final_xts,
                final_v0=None if math.isnan(r.final_v0) else r.final_v0,
                status=r.status, wall_ms=r.wall_ms) for r in report.rows])

    @app.post("/bench/trace", response_model=schemas.TraceResponse)
    def trace(req: schemas.TraceRequest):
        resolved = None if req.tau == "theory" else float(req.tau)
        result = bench.run_trace(
            req.n, req.seed, bench.parse_direction(req.direction), req.eps,
            eta=req.eta, beta=req.beta, tau=resolved)
        return schemas.TraceResponse(
            n=result.n, seed=result.seed, direction=result.direction,
            eps=result.eps, initial_xts=result.initial_xts,
            initial_exponent=result.initial_exponent,
            rows=[schemas.TraceRowPayload(
                exponent=row.exponent, predictors=row.predictors,
                correctors=row.correctors) for row in result.rows],
            converged=result.converged, final_xts=result.final_xts,
            predictors=result.predictors, correctors=result.correctors,
            diagnostics=_diagnostics_payload(result.diagnostics,
                                             result.degenerate_partition))

    return app


app = create_app()
