"""Corrector stage: recentering steps at a fixed target.

With the target w held fixed, moving along the corrector direction keeps
every residual an exact quadratic in the step length:

    r_0(alpha) = (1-alpha) r_0 + alpha rho - alpha^2 dx^T ds
    r_i(alpha) = (1-alpha) r_i + alpha rho + alpha^2 dx_i ds_i

so the restricted barrier f(alpha) = -sum(ln r_i(alpha)) has closed-form
derivatives: f'(0) = -zeta0^2 and
f''(0) = zeta1^2 + (2/rho)(dx^T ds / rhat_0^2 - sum_i dx_i ds_i / rhat_i^2).

A corrector step tries the Newton step of the restricted function,
alpha = -f'(0)/f''(0), clipped to the feasible segment, and accepts it
only when it decreases f by at least omega(lam) with
lam = |f'(0)|/sqrt(f''(0)): that is the decrease certified for the
damped Newton step alpha = -f'(0)/((1+lam) f''(0)), which is taken
instead whenever the Newton step misses the certificate. An exact line
search (bisection on f' over the first feasible subinterval) is the
last resort, covering nonpositive curvature and floating-point
degeneracies. Whichever step fires at proximity delta >= beta decreases
the barrier by at least omega(beta/sqrt(1+2 beta)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .directions import SearchDirection, corrector_direction
from .errors import (CorrectorBudgetExceeded, NotInteriorPoint,
                     StalledCorrector)
from .predictor import smallest_positive_roots
from .problem import LcpProblem
from .target_space import Iterate, barrier_value, omega, proximities

SLOPE_TOL = 1e-12
MAX_BISECT = 60
MIN_DECREASE = 1e-14
# Loop budget multiplier over the guaranteed worst-case step count.
BUDGET_FACTOR = 10


def max_corrector_steps(tau: float, beta: float) -> int:
    """Worst-case corrector steps from barrier gap tau to proximity beta."""
    return int(math.floor(tau / omega(beta / math.sqrt(1.0 + 2.0 * beta)))) + 1


@dataclass(frozen=True)
class CorrectorLine:
    """Quadratic residual coefficients along a corrector direction."""

    c0: np.ndarray
    c1: np.ndarray
    c2: np.ndarray

    def residuals_at(self, alpha: float) -> np.ndarray:
        return self.c0 + alpha * (self.c1 + alpha * self.c2)

    def value(self, alpha: float) -> float:
        """Restricted barrier f(alpha); raises off the feasible segment."""
        r = self.residuals_at(alpha)
        worst = int(np.argmin(r))
        if r[worst] <= 0.0:
            raise NotInteriorPoint(
                f"residual r[{worst}] nonpositive at alpha={alpha}",
                index=worst)
        return float(-np.sum(np.log(r)))

    def slope(self, alpha: float) -> float:
        """f'(alpha); raises off the feasible segment."""
        r = self.residuals_at(alpha)
        worst = int(np.argmin(r))
        if r[worst] <= 0.0:
            raise NotInteriorPoint(
                f"residual r[{worst}] nonpositive at alpha={alpha}",
                index=worst)
        return float(-np.sum((self.c1 + 2.0 * alpha * self.c2) / r))

    def curvature(self, alpha: float = 0.0) -> float:
        """f''(alpha); raises off the feasible segment."""
        r = self.residuals_at(alpha)
        worst = int(np.argmin(r))
        if r[worst] <= 0.0:
            raise NotInteriorPoint(
                f"residual r[{worst}] nonpositive at alpha={alpha}",
                index=worst)
        slopes = (self.c1 + 2.0 * alpha * self.c2) / r
        return float(np.sum(slopes * slopes) - np.sum(2.0 * self.c2 / r))

    def _slope_or_inf(self, alpha: float) -> float:
        r = self.residuals_at(alpha)
        if r.min() <= 0.0:
            return math.inf
        return float(-np.sum((self.c1 + 2.0 * alpha * self.c2) / r))


def build_line(it: Iterate, direction: SearchDirection) -> CorrectorLine:
    """Residual quadratics along a direction with the target held fixed."""
    prod = direction.dx * direction.ds
    n = it.n
    c1 = np.empty(n + 1)
    c1[0] = it.rho - it.r[0]
    c1[1:] = it.rho - it.r[1:]
    c2 = np.empty(n + 1)
    c2[0] = -float(np.sum(prod))
    c2[1:] = prod
    return CorrectorLine(c0=it.r.copy(), c1=c1, c2=c2)


def _feasible_limit(it: Iterate, direction: SearchDirection,
                    line: CorrectorLine) -> float:
    limit = float(np.min(smallest_positive_roots(line.c2, line.c1, line.c0)))
    for val, der in ((it.x, direction.dx), (it.s, direction.ds)):
        neg = der < 0.0
        if neg.any():
            limit = min(limit, float(np.min(-val[neg] / der[neg])))
    return limit


@dataclass(frozen=True)
class CorrectorStep:
    """One recentering step and its measurements.

    mode is "newton" for an accepted full Newton step, "damped" for the
    certified damped step, "search" for the exact line-search fallback.
    """

    new_iterate: Iterate
    direction: SearchDirection
    entry_iterate: Iterate
    alpha: float
    f_decrease: float
    delta_entry: float
    decrement: float
    mode: str


def _line_search_alpha(line: CorrectorLine, hi: float) -> float:
    """Bisection on f' over [0, hi]; assumes f'(0) < 0."""
    if line._slope_or_inf(hi) <= 0.0:
        return hi
    lo = 0.0
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if line._slope_or_inf(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= SLOPE_TOL:
            break
    return lo


def corrector_step(it: Iterate, p: LcpProblem) -> CorrectorStep:
    """One recentering Newton step at the current target."""
    direction = corrector_direction(p, it)
    line = build_line(it, direction)
    delta_entry = proximities(it).delta

    slope0 = line.slope(0.0)
    if slope0 >= -SLOPE_TOL:
        raise StalledCorrector(
            f"flat corrector direction (f'(0) = {slope0:.3e})")
    limit = _feasible_limit(it, direction, line)
    hi = min(limit * (1.0 - 1e-12), 1.0)

    f_old = barrier_value(it)
    curv = line.curvature(0.0)
    decrement = -slope0 / math.sqrt(curv) if curv > 0.0 else math.inf

    def attempt(step: float, floor: float) -> tuple[Iterate, float] | None:
        if step <= 0.0:
            return None
        try:
            cand = Iterate.from_point(it.x + step * direction.dx,
                                      it.s + step * direction.ds, it.w)
        except NotInteriorPoint:
            return None
        dec = f_old - barrier_value(cand)
        if dec < floor:
            return None
        return cand, dec

    alpha = 0.0
    mode = "search"
    result = None
    if curv > 0.0:
        certified = omega(decrement) - 1e-12
        alpha = min(-slope0 / curv, hi)
        result = attempt(alpha, max(certified, MIN_DECREASE))
        if result is not None:
            mode = "newton"
        else:
            alpha = min(-slope0 / ((1.0 + decrement) * curv), hi)
            result = attempt(alpha, MIN_DECREASE)
            if result is not None:
                mode = "damped"
    if result is None:
        mode = "search"
        alpha = _line_search_alpha(line, hi)
        result = attempt(alpha, MIN_DECREASE)
    if result is None:
        raise StalledCorrector(
            f"no barrier decrease at alpha={alpha:.3e} "
            f"(f'(0)={slope0:.3e}, f''(0)={curv:.3e})")
    new_it, decrease = result
    return CorrectorStep(new_iterate=new_it, direction=direction,
                         entry_iterate=it, alpha=alpha, f_decrease=decrease,
                         delta_entry=delta_entry, decrement=decrement,
                         mode=mode)


def corrector_loop(it: Iterate, p: LcpProblem, beta: float, *,
                   tau: float | None = None,
                   records: list | None = None) -> tuple[Iterate, int]:
    """Recenter until proximity delta <= beta; returns (iterate, steps).

    The step budget is BUDGET_FACTOR times the worst-case count for the
    supplied tau (or for the entry barrier gap when tau is None); hitting
    it raises CorrectorBudgetExceeded, which signals a bug rather than a
    hard instance.
    """
    gap = tau if tau is not None else max(proximities(it).psi, 1e-6)
    budget = BUDGET_FACTOR * max_corrector_steps(gap, beta)
    steps = 0
    while proximities(it).delta > beta:
        if steps >= budget:
            raise CorrectorBudgetExceeded(
                f"{steps} corrector steps without reaching delta <= {beta}")
        step = corrector_step(it, p)
        if records is not None:
            records.append(step)
        it = step.new_iterate
        steps += 1
    return it, steps
