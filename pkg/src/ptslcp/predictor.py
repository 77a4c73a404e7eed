"""Predictor stage: residual expansion along the scaling ray and the step.

The predictor moves along z(alpha) = (x + alpha dx, s + alpha ds,
(1 - alpha) w). Along that ray the deviation of the residuals from their
mean is an exact quadratic,

    d(alpha) = r(z(alpha)) - rho(w(alpha)) e = base + alpha h + alpha^2 g,

with base = r - rho e and coefficient vectors h, g determined by the
direction; the universal tangent direction has h = 0, the auto-corrector
has base + h = 0. The mean itself is
rho(w(alpha)) = (1 - alpha)(rho + alpha ||v||^2/(n+1)).

The step is the largest alpha in the first feasible subinterval keeping
the barrier gap at most tau, found by closed-form feasibility roots plus
bisection on psi(z(alpha)) - tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .directions import SearchDirection
from .errors import StalledPredictor
from .target_space import Iterate, TargetPoint, proximities

# Bisection controls (alpha bracket width, psi band below tau, iteration cap).
ALPHA_TOL = 1e-10
PSI_BAND = 1e-6
MAX_BISECT = 60
MIN_STEP = 1e-14


@dataclass(frozen=True)
class RayExpansion:
    """Quadratic data of d(alpha) and rho(w(alpha)) along the predictor ray."""

    base: np.ndarray
    h: np.ndarray
    g: np.ndarray
    rho0: float
    vnorm2: float
    n: int

    def rho_at(self, alpha: float) -> float:
        return (1.0 - alpha) * (self.rho0
                                + alpha * self.vnorm2 / (self.n + 1))

    def deviation_at(self, alpha: float) -> np.ndarray:
        # base + alpha*h regrouped as (1-alpha)*base + alpha*(base+h): exact
        # algebraically, and stable for both special directions (h = 0 and
        # base + h = 0).
        return ((1.0 - alpha) * self.base + alpha * (self.base + self.h)
                + alpha * alpha * self.g)

    def residual_coefficients(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(c0, c1, c2) with r_i(z(alpha)) = c0 + c1 alpha + c2 alpha^2."""
        kv = self.vnorm2 / (self.n + 1)
        c0 = self.base + self.rho0
        c1 = self.h + (kv - self.rho0)
        c2 = self.g - kv
        return c0, c1, c2


def expand_ray(it: Iterate, direction: SearchDirection) -> RayExpansion:
    """Exact quadratic expansion of the residuals along the predictor ray."""
    n = it.n
    w = it.w
    a = direction.a
    kv = w.vnorm2 / (n + 1)
    v2 = w.v * w.v

    base = it.r - it.rho
    h = np.empty(n + 1)
    h[0] = -w.v0 - float(a.sum()) + it.rho - kv
    h[1:] = a + 2.0 * v2 + it.rho - kv
    g = np.empty(n + 1)
    prod = direction.dx * direction.ds
    g[0] = kv - float(np.sum(prod))
    g[1:] = prod - v2 + kv
    return RayExpansion(base=base, h=h, g=g, rho0=it.rho,
                        vnorm2=w.vnorm2, n=n)


def rho_along_ray(w: TargetPoint, alpha: float) -> float:
    """Mean residual of the shrunk target (1 - alpha) w."""
    return (1.0 - alpha) * (w.rho + alpha * w.vnorm2 / (w.n + 1))


def psi_along_ray(exp: RayExpansion, alpha: float) -> float:
    """Barrier gap at z(alpha) from the expansion; inf when infeasible."""
    rho = exp.rho_at(alpha)
    if rho <= 0.0:
        return math.inf
    ratio = 1.0 + exp.deviation_at(alpha) / rho
    if ratio.min() <= 0.0:
        return math.inf
    return float(-np.sum(np.log(ratio)))


def smallest_positive_roots(c2: np.ndarray, c1: np.ndarray,
                            c0: np.ndarray) -> np.ndarray:
    """First positive root of each c0 + c1 t + c2 t^2 (inf when none).

    Assumes c0 > 0 componentwise, i.e. the quadratics start positive.
    """
    out = np.full(c0.shape, np.inf)
    quad = c2 != 0.0
    lin = ~quad & (c1 < 0.0)
    out[lin] = -c0[lin] / c1[lin]
    if quad.any():
        a = c2[quad]
        b = c1[quad]
        c = c0[quad]
        disc = b * b - 4.0 * a * c
        real = disc >= 0.0
        sq = np.sqrt(np.where(real, disc, 0.0))
        qq = -0.5 * (b + np.copysign(sq, b))
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = qq / a
            r2 = c / qq
        r1 = np.where(real & (r1 > 0.0), r1, np.inf)
        r2 = np.where(real & np.isfinite(r2) & (r2 > 0.0), r2, np.inf)
        out[quad] = np.minimum(r1, r2)
    return out


def feasible_alpha_limit(exp: RayExpansion,
                         direction: SearchDirection | None = None,
                         it: Iterate | None = None) -> float:
    """Upper end of the first feasible subinterval of the ray from 0.

    Residual positivity comes from the quadratic roots; when the iterate
    and direction are supplied, the linear positivity limits of
    x + alpha dx and s + alpha ds are included as well (a residual can
    stay positive past a sign flip of both factors when v_i = 0).
    """
    c0, c1, c2 = exp.residual_coefficients()
    limit = float(np.min(smallest_positive_roots(c2, c1, c0)))
    if direction is not None and it is not None:
        for val, der in ((it.x, direction.dx), (it.s, direction.ds)):
            neg = der < 0.0
            if neg.any():
                limit = min(limit, float(np.min(-val[neg] / der[neg])))
    return limit


def _psi_recomputed(it: Iterate, direction: SearchDirection,
                    alpha: float) -> float:
    """Barrier gap at z(alpha) recomputed from the moved point; inf outside."""
    shrink = 1.0 - alpha
    x = it.x + alpha * direction.dx
    s = it.s + alpha * direction.ds
    if x.min() <= 0.0 or s.min() <= 0.0:
        return math.inf
    v0 = shrink * it.w.v0
    vnorm2 = shrink * shrink * it.w.vnorm2
    rho = (v0 - vnorm2) / (it.n + 1)
    if rho <= 0.0:
        return math.inf
    xs = x * s
    r0 = v0 - float(xs.sum())
    v = shrink * it.w.v
    ri = xs - v * v
    if r0 <= 0.0 or ri.min() <= 0.0:
        return math.inf
    return float(-(math.log(r0 / rho) + np.sum(np.log(ri / rho))))


@dataclass(frozen=True)
class PredictorResult:
    alpha_p: float
    new_iterate: Iterate
    psi_at_alpha: float
    bisection_iters: int


def predictor_step(it: Iterate, direction: SearchDirection,
                   tau: float) -> PredictorResult:
    """Largest step along the ray keeping the barrier gap at most tau.

    Bisects psi(z(alpha)) - tau inside the first feasible subinterval;
    psi is evaluated by direct recomputation of the moved point so the
    accepted iterate satisfies psi <= tau in the same arithmetic used by
    later audits (the expansion supplies the feasibility bracket).
    """
    psi0 = proximities(it).psi
    if psi0 >= tau:
        raise StalledPredictor(
            f"barrier gap {psi0:.6f} already at or above tau={tau:.6f}")
    exp = expand_ray(it, direction)
    limit = min(feasible_alpha_limit(exp, direction, it), 1.0)
    if not limit > 0.0:
        raise StalledPredictor("feasible interval along the ray is empty")
    hi = limit * (1.0 - 1e-12)

    psi_hi = _psi_recomputed(it, direction, hi)
    iters = 0
    if psi_hi <= tau:
        alpha, psi_alpha = hi, psi_hi
    else:
        lo, psi_lo = 0.0, psi0
        while iters < MAX_BISECT:
            iters += 1
            mid = 0.5 * (lo + hi)
            psi_mid = _psi_recomputed(it, direction, mid)
            if psi_mid <= tau:
                lo, psi_lo = mid, psi_mid
            else:
                hi = mid
            if hi - lo <= ALPHA_TOL and tau - psi_lo <= PSI_BAND:
                break
        alpha, psi_alpha = lo, psi_lo

    if alpha <= MIN_STEP:
        raise StalledPredictor(
            f"step search stalled at alpha = {alpha:.3e}")
    new_it = Iterate.from_point(it.x + alpha * direction.dx,
                                it.s + alpha * direction.ds,
                                it.w.scaled(1.0 - alpha))
    return PredictorResult(alpha_p=alpha, new_iterate=new_it,
                           psi_at_alpha=psi_alpha, bisection_iters=iters)
