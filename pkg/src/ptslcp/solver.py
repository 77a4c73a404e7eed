"""Predictor-corrector driver, solve trace, and terminal diagnostics.

Each outer iteration takes one predictor step (universal tangent or
auto-corrector direction), shrinking the target by the accepted step
length, then recenters with corrector steps until the proximity delta
drops back to beta. The loop stops once the target height v0 falls to
eps; since x^T s < v0 throughout, the complementarity gap is below eps
at exit.

Audit mode turns the theory guarantees into hard runtime assertions:
direction product bounds, predictor step-length floor, strict decrease
of v0 and of the merit value, per-step corrector decrease, per-outer
corrector step cap, bounded affine drift, and (with theory parameters)
the worst-case outer iteration count.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import linalg
from .corrector import CorrectorStep, corrector_loop, max_corrector_steps
from .directions import (PREDICTOR_KINDS, DirectionKind, direction_bounds,
                         predictor_direction)
from .errors import (AuditViolation, BudgetExceeded, NumericalFailure,
                     PtsLcpError, SingularBlock, SingularMatrix)
from .predictor import predictor_step
from .problem import (FeasiblePair, LcpProblem, check_strictly_feasible,
                      feasibility_residual)
from .target_space import (Iterate, boundary_coefficient, lift_start, merit,
                           omega, omega_star, proximities, residuals)

DRIFT_RTOL = 1e-8


def theory_tau(beta: float) -> float:
    """The barrier-gap radius omega*(2 beta / (1 - beta)) of the theory run."""
    return omega_star(2.0 * beta / (1.0 - beta))


def theory_outer_bound(n: int, mu_initial: float, eps: float) -> int:
    """Worst-case predictor count ceil(4 sqrt(n) ln(mu0/eps)) (beta = 1/4)."""
    if mu_initial <= eps:
        return 0
    return int(math.ceil(4.0 * math.sqrt(n) * math.log(mu_initial / eps)))


@dataclass(frozen=True)
class SolverConfig:
    """Algorithm parameters.

    tau = None selects the theory radius omega*(2 beta/(1-beta));
    max_outer = None selects twice the worst-case outer bound.
    """

    beta: float = 0.25
    tau: float | None = None
    eps: float = 1e-7
    direction: DirectionKind = DirectionKind.AUTO_CORRECTOR
    max_outer: int | None = None
    audit: bool = False

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0 / 3.0:
            raise ValueError(f"beta must lie in (0, 1/3), got {self.beta}")
        if self.tau is not None and not self.tau > theory_tau(self.beta):
            raise ValueError(
                f"tau must exceed the theory radius {theory_tau(self.beta):.6f}"
                f" for beta={self.beta}, got {self.tau}")
        if not self.eps > 0.0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.direction not in PREDICTOR_KINDS:
            raise ValueError(f"{self.direction} is not a predictor direction")
        if self.max_outer is not None and self.max_outer < 1:
            raise ValueError(f"max_outer must be >= 1, got {self.max_outer}")

    @property
    def resolved_tau(self) -> float:
        return self.tau if self.tau is not None else theory_tau(self.beta)

    @property
    def uses_theory_tau(self) -> bool:
        return self.tau is None


class Termination(enum.Enum):
    CONVERGED = "converged"
    BUDGET_EXCEEDED = "budget_exceeded"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass(frozen=True)
class OuterRecord:
    """State after one outer (predictor + correctors) iteration."""

    index: int
    alpha_p: float
    corrector_steps: int
    v0: float
    xts: float
    psi_after_pred: float
    delta_after_corr: float
    mu_star: float
    partition_b: tuple[int, ...]


@dataclass(frozen=True)
class AuditReport:
    """Summary of the runtime oracle checks of one audited solve."""

    directions_checked: int
    min_direction_margin: float
    corrector_steps_checked: int
    min_corrector_decrease: float
    corrector_decrease_floor: float
    max_corrector_steps_outer: int
    corrector_step_bound: int
    max_feasibility_drift: float
    theory_predictor_bound: int | None
    fallback_steps: int


@dataclass
class SolveTrace:
    """Per-iteration records and totals of one solve."""

    n: int
    direction: DirectionKind
    beta: float
    tau: float
    eps: float
    v0_initial: float
    xts_initial: float
    mu_star_initial: float
    records: list[OuterRecord] = field(default_factory=list)
    predictor_count: int = 0
    corrector_count: int = 0
    corrector_fallbacks: int = 0
    termination: Termination = Termination.NUMERICAL_FAILURE
    feasibility_drift: float = math.nan
    audit: AuditReport | None = None


def initial_iterate(p: LcpProblem, start: FeasiblePair) -> Iterate:
    """Lift a strictly feasible pair onto its own target (delta = 0)."""
    pair = check_strictly_feasible(p, start.x, start.s)
    return Iterate.from_point(pair.x, pair.s, lift_start(pair.x, pair.s))


class _Audit:
    """Collects and enforces the runtime theory oracles."""

    def __init__(self, p: LcpProblem, cfg: SolverConfig, mu0: float, n: int):
        self.enabled = cfg.audit
        self.beta = cfg.beta
        self.tau = cfg.resolved_tau
        self.drift_tol = DRIFT_RTOL * (1.0 + float(np.abs(p.q).max()))
        self.decrease_floor = omega(
            cfg.beta / math.sqrt(1.0 + 2.0 * cfg.beta))
        self.step_bound = max_corrector_steps(self.tau, cfg.beta)
        self.alpha_floor_coeff = (0.5 * math.sqrt(cfg.beta / (1.0 - cfg.beta))
                                  / math.sqrt(n))
        self.theory_bound = None
        if cfg.uses_theory_tau and abs(cfg.beta - 0.25) < 1e-12:
            self.theory_bound = theory_outer_bound(n, mu0, cfg.eps)
        self.directions_checked = 0
        self.min_margin = math.inf
        self.corrector_checked = 0
        self.min_decrease = math.inf
        self.max_steps_outer = 0
        self.max_drift = 0.0

    def fail(self, message: str):
        raise AuditViolation(message)

    def check_direction(self, direction, it):
        bounds = direction_bounds(direction, it)
        self.directions_checked += 1
        worst = min(bounds.margins().values())
        self.min_margin = min(self.min_margin, worst)
        if not bounds.satisfied(1e-9):
            self.fail(f"direction bound violated: {bounds.margins()}")

    def check_entry(self, delta: float):
        if delta > self.beta + 1e-9:
            self.fail(f"predictor entry delta {delta:.3e} > beta {self.beta}")

    def check_predictor(self, result, w_before, it_before):
        if result.psi_at_alpha > self.tau + 1e-9:
            self.fail(f"psi after predictor {result.psi_at_alpha:.6f} "
                      f"> tau {self.tau:.6f}")
        coeff = boundary_coefficient(w_before)
        ratio = 1.0 if math.isinf(coeff) else (coeff - 1.0) / coeff
        floor = self.alpha_floor_coeff * ratio
        if result.alpha_p <= floor * (1.0 - 1e-6):
            self.fail(f"predictor step {result.alpha_p:.3e} below "
                      f"theory floor {floor:.3e}")
        w_after = result.new_iterate.w
        if not w_after.v0 < w_before.v0:
            self.fail("v0 did not decrease across predictor step")
        if not merit(w_after) < merit(w_before):
            self.fail("merit did not decrease across predictor step")

    def check_corrector_records(self, records: list[CorrectorStep]):
        for step in records:
            self.check_direction(step.direction, step.entry_iterate)
            self.corrector_checked += 1
            self.min_decrease = min(self.min_decrease, step.f_decrease)
            if (step.delta_entry >= self.beta
                    and step.f_decrease < self.decrease_floor - 1e-9):
                self.fail(
                    f"corrector decrease {step.f_decrease:.6e} below "
                    f"floor {self.decrease_floor:.6e} at "
                    f"delta {step.delta_entry:.4f}")
        if len(records) > self.step_bound:
            self.fail(f"{len(records)} corrector steps exceed the bound "
                      f"{self.step_bound}")
        self.max_steps_outer = max(self.max_steps_outer, len(records))

    def check_drift(self, p: LcpProblem, it: Iterate):
        drift = feasibility_residual(p, it.x, it.s)
        self.max_drift = max(self.max_drift, drift)
        if drift > self.drift_tol:
            self.fail(f"affine drift {drift:.3e} exceeds {self.drift_tol:.3e}")

    def check_total(self, predictor_count: int):
        if self.theory_bound is not None and predictor_count > self.theory_bound:
            self.fail(f"{predictor_count} predictor steps exceed the theory "
                      f"bound {self.theory_bound}")

    def report(self, fallbacks: int) -> AuditReport:
        return AuditReport(
            directions_checked=self.directions_checked,
            min_direction_margin=self.min_margin,
            corrector_steps_checked=self.corrector_checked,
            min_corrector_decrease=self.min_decrease,
            corrector_decrease_floor=self.decrease_floor,
            max_corrector_steps_outer=self.max_steps_outer,
            corrector_step_bound=self.step_bound,
            max_feasibility_drift=self.max_drift,
            theory_predictor_bound=self.theory_bound,
            fallback_steps=fallbacks,
        )


def _partition(it: Iterate) -> tuple[int, ...]:
    return tuple(int(i) for i in np.flatnonzero(it.x >= it.s))


def solve(p: LcpProblem, start: FeasiblePair,
          cfg: SolverConfig = SolverConfig()
          ) -> tuple[np.ndarray, np.ndarray, SolveTrace]:
    """Drive the target height v0 below cfg.eps; returns (x, s, trace).

    Raises BudgetExceeded when the outer budget runs out and
    NumericalFailure when a lower-level error interrupts the solve; both
    carry the partial trace on .trace.
    """
    it = initial_iterate(p, start)
    tau = cfg.resolved_tau
    mu0 = merit(it.w)
    trace = SolveTrace(n=p.n, direction=cfg.direction, beta=cfg.beta,
                       tau=tau, eps=cfg.eps, v0_initial=it.w.v0,
                       xts_initial=it.xts, mu_star_initial=mu0)
    bound = theory_outer_bound(p.n, mu0, cfg.eps)
    max_outer = cfg.max_outer if cfg.max_outer is not None else max(
        2 * bound, 1)
    audit = _Audit(p, cfg, mu0, p.n)

    while it.w.v0 > cfg.eps:
        if len(trace.records) >= max_outer:
            trace.termination = Termination.BUDGET_EXCEEDED
            trace.feasibility_drift = feasibility_residual(p, it.x, it.s)
            raise BudgetExceeded(
                f"no convergence within {max_outer} outer iterations",
                trace=trace)
        try:
            entry_prox = proximities(it)
            if audit.enabled:
                audit.check_entry(entry_prox.delta)
            direction = predictor_direction(p, it, cfg.direction)
            if audit.enabled:
                audit.check_direction(direction, it)
            w_before = it.w
            pred = predictor_step(it, direction, tau)
            if audit.enabled:
                audit.check_predictor(pred, w_before, it)
            it = pred.new_iterate
            records: list[CorrectorStep] = []
            it, steps = corrector_loop(it, p, cfg.beta, tau=tau,
                                       records=records)
            trace.corrector_fallbacks += sum(
                1 for rec in records if rec.mode == "search")
            if audit.enabled:
                audit.check_corrector_records(records)
                audit.check_drift(p, it)
        except (BudgetExceeded, AuditViolation):
            raise
        except PtsLcpError as exc:
            trace.termination = Termination.NUMERICAL_FAILURE
            trace.feasibility_drift = feasibility_residual(p, it.x, it.s)
            raise NumericalFailure(f"solve failed: {exc}", trace=trace) from exc
        trace.records.append(OuterRecord(
            index=len(trace.records),
            alpha_p=pred.alpha_p,
            corrector_steps=steps,
            v0=it.w.v0,
            xts=it.xts,
            psi_after_pred=pred.psi_at_alpha,
            delta_after_corr=proximities(it).delta,
            mu_star=merit(it.w),
            partition_b=_partition(it),
        ))
        trace.predictor_count += 1
        trace.corrector_count += steps

    trace.feasibility_drift = feasibility_residual(p, it.x, it.s)
    if trace.feasibility_drift > DRIFT_RTOL * (1.0 + float(np.abs(p.q).max())):
        trace.termination = Termination.NUMERICAL_FAILURE
        raise NumericalFailure(
            f"affine feasibility drifted to {trace.feasibility_drift:.3e}",
            trace=trace)
    if audit.enabled:
        audit.check_total(trace.predictor_count)
        trace.audit = audit.report(trace.corrector_fallbacks)
    trace.termination = Termination.CONVERGED
    return it.x, it.s, trace


@dataclass(frozen=True)
class LocalDiagnostics:
    """Terminal partition data and the quadratic-tail certificate inputs.

    B collects the indices with x_i >= s_i at termination; sigma is the
    smallest surviving component, kappa the inf-norm of the partitioned
    inverse-block matrix. The tail threshold sigma^2/(4 kappa) marks the
    region where one further auto-corrector predictor step squares the
    target height; quad_tail lists the (v0_k, v0_{k+1}) pairs observed
    inside that region.
    """

    partition_b: tuple[int, ...]
    m: int
    sigma: float
    kappa: float
    nu_d: float
    nu_a: float
    tail_threshold: float
    quad_tail: tuple[tuple[float, float], ...]
    partition_stable: bool


def _partitioned_inverse(p: LcpProblem, b_idx: np.ndarray,
                         n_idx: np.ndarray) -> np.ndarray:
    """Assemble [[Mbb^-1, -Mbb^-1 Mbn], [Mnb Mbb^-1, Mnn - Mnb Mbb^-1 Mbn]]."""
    n = p.n
    out = np.zeros((n, n))
    if b_idx.size == 0:
        out[np.ix_(n_idx, n_idx)] = p.M[np.ix_(n_idx, n_idx)]
        return out
    mbb = p.M[np.ix_(b_idx, b_idx)]
    try:
        factors = linalg.lu_factor(mbb)
    except SingularMatrix as exc:
        raise SingularBlock(
            f"M_BB singular for |B|={b_idx.size}: {exc}") from exc
    inv = np.column_stack([
        linalg.lu_solve(factors, col) for col in np.eye(b_idx.size).T])
    out[np.ix_(b_idx, b_idx)] = inv
    if n_idx.size:
        mbn = p.M[np.ix_(b_idx, n_idx)]
        mnb = p.M[np.ix_(n_idx, b_idx)]
        mnn = p.M[np.ix_(n_idx, n_idx)]
        out[np.ix_(b_idx, n_idx)] = -inv @ mbn
        out[np.ix_(n_idx, b_idx)] = mnb @ inv
        out[np.ix_(n_idx, n_idx)] = mnn - mnb @ (inv @ mbn)
    return out


def local_diagnostics(p: LcpProblem, trace: SolveTrace, x, s
                      ) -> LocalDiagnostics:
    """Partition-based diagnostics at the returned point.

    Raises SingularBlock on a degenerate terminal partition (singular
    M_BB); batch callers catch it and flag the instance instead.
    """
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    mask = x >= s
    b_idx = np.flatnonzero(mask)
    n_idx = np.flatnonzero(~mask)
    parts = []
    if b_idx.size:
        parts.append(x[b_idx].min())
    if n_idx.size:
        parts.append(s[n_idx].min())
    sigma = float(min(parts))
    mhat = _partitioned_inverse(p, b_idx, n_idx)
    kappa = float(np.abs(mhat).sum(axis=1).max())

    scale = np.empty(p.n)
    scale[b_idx] = s[b_idx] / x[b_idx]
    if n_idx.size:
        scale[n_idx] = x[n_idx] / s[n_idx]
    nu_d = float(scale.max())

    # Scaled-RHS norm with the auto-corrector right-hand side taken at the
    # terminal point's own lift, making nu_a a function of (x, s) alone.
    w = lift_start(x, s)
    r, _, _ = residuals(x, s, w)
    kv = w.vnorm2 / (p.n + 1)
    a = kv - w.v * w.v - x * s
    scaled_a = np.empty(p.n)
    scaled_a[b_idx] = a[b_idx] / x[b_idx]
    if n_idx.size:
        scaled_a[n_idx] = a[n_idx] / s[n_idx]
    nu_a = float(np.linalg.norm(scaled_a))

    threshold = sigma * sigma / (4.0 * kappa) if kappa > 0.0 else math.inf
    pairs = []
    heights = [rec.v0 for rec in trace.records]
    for k in range(len(heights) - 1):
        if heights[k] <= threshold:
            pairs.append((heights[k], heights[k + 1]))

    tail = trace.records[-3:]
    final_b = tuple(int(i) for i in b_idx)
    stable = bool(tail) and all(rec.partition_b == final_b for rec in tail)
    return LocalDiagnostics(
        partition_b=final_b, m=int(b_idx.size), sigma=sigma, kappa=kappa,
        nu_d=nu_d, nu_a=nu_a, tail_threshold=float(threshold),
        quad_tail=tuple(pairs), partition_stable=stable)


def config_for_direction(cfg: SolverConfig,
                         direction: DirectionKind) -> SolverConfig:
    """The same parameters with a different predictor direction."""
    return replace(cfg, direction=direction)
