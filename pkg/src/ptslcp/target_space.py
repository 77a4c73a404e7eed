"""Parabolic target space: targets, lifted iterates, and proximity measures.

A target w = (v0, v) with v0 > ||v||^2 steers the iterate toward
complementarity. Lifting a strictly feasible pair (x, s) against w gives
n+1 residuals

    r_0 = v0 - x^T s,      r_i = x_i s_i - v_i^2   (i = 1..n),

all of which must stay strictly positive. Their mean is
rho = (v0 - ||v||^2)/(n+1) and the normalized residuals are
r_hat = sqrt(r/rho), so that sum(r_hat^2) = n+1 identically.

Proximity of the lifted point to the center of its target:

    zeta0^2 = ||r_hat - 1/r_hat||^2      (squared Newton-slope norm)
    zeta1   = ||1/r_hat^2 - 1||
    zeta2   = ||r_hat^2 - 1||
    delta   = zeta0^2 / zeta1            (0 when zeta1 = 0)
    psi     = -sum(ln r_hat_i^2) >= 0    (barrier gap)

The barrier over lifted points is F(z) = -sum(ln r_i); its value at the
center of w is the control value phi(w) = -(n+1) ln rho, and
psi = F - phi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (DimensionMismatch, DomainError, NonPositiveInput,
                     NotInteriorPoint)


def omega(t: float) -> float:
    """omega(t) = t - ln(1 + t) on [0, inf); standard decrease estimate."""
    if not (t >= 0.0):
        raise DomainError(f"omega requires t >= 0, got {t}")
    return t - math.log1p(t)


def omega_star(t: float) -> float:
    """omega*(t) = -t - ln(1 - t) on [0, 1); conjugate growth estimate."""
    if not (0.0 <= t < 1.0):
        raise DomainError(f"omega_star requires 0 <= t < 1, got {t}")
    return -t - math.log1p(-t)


@dataclass(frozen=True)
class TargetPoint:
    """A point w = (v0, v) in the open parabolic target set v0 > ||v||^2."""

    v0: float
    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        if v.ndim != 1:
            raise DimensionMismatch(f"v must be 1-D, got shape {v.shape}")
        if not (np.all(np.isfinite(v)) and math.isfinite(self.v0)):
            raise DimensionMismatch("target coordinates must be finite")
        vnorm2 = float(v @ v)
        if not self.v0 > vnorm2:
            raise NotInteriorPoint(
                f"target violates v0 > ||v||^2: v0={self.v0}, "
                f"||v||^2={vnorm2}")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "_vnorm2", vnorm2)

    @property
    def n(self) -> int:
        return self.v.shape[0]

    @property
    def vnorm2(self) -> float:
        """Cached ||v||^2."""
        return self._vnorm2

    @property
    def rho(self) -> float:
        """Mean residual depth (v0 - ||v||^2)/(n+1) of the target."""
        return (self.v0 - self._vnorm2) / (self.n + 1)

    def scaled(self, factor: float) -> "TargetPoint":
        """The target factor*w; stays interior for factor in (0, 1]."""
        return TargetPoint(v0=factor * self.v0, v=factor * self.v)


def lift_start(x, s) -> TargetPoint:
    """Target whose center is exactly (x, s): the canonical warm start.

    With xi = min_i x_i s_i the target is v = sqrt(xs - xi e),
    v0 = x^T s + xi. All n+1 residuals equal xi, so the lifted point is
    the center of its own target (delta = 0, psi = 0).
    """
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    if x.shape != s.shape or x.ndim != 1 or x.size == 0:
        raise DimensionMismatch(
            f"x and s must be matching 1-D arrays, got {x.shape}/{s.shape}")
    if x.min() <= 0.0 or s.min() <= 0.0:
        raise NonPositiveInput("lift requires strictly positive x and s")
    xs = x * s
    xi = float(xs.min())
    v = np.sqrt(xs - xi)
    return TargetPoint(v0=float(x @ s) + xi, v=v)


def residuals(x, s, w: TargetPoint) -> tuple[np.ndarray, float, np.ndarray]:
    """Residual vector r (length n+1), mean rho, and r_hat = sqrt(r/rho).

    Raises NotInteriorPoint when any residual is nonpositive in floating
    point; there is no epsilon slack by design.
    """
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    n = w.n
    if x.shape != (n,) or s.shape != (n,):
        raise DimensionMismatch(
            f"point shapes {x.shape}/{s.shape} do not match target n={n}")
    r = np.empty(n + 1)
    r[0] = w.v0 - float(x @ s)
    r[1:] = x * s - w.v * w.v
    worst = int(np.argmin(r))
    if r[worst] <= 0.0:
        raise NotInteriorPoint(
            f"residual r[{worst}] = {r[worst]:.3e} is not positive",
            index=worst)
    rho = (w.v0 - w.vnorm2) / (n + 1)
    return r, rho, np.sqrt(r / rho)


@dataclass(frozen=True)
class Iterate:
    """A lifted point z = (x, s, w) with cached residual data.

    Instances are immutable after construction; every step builds a new
    one through from_point, which enforces the strict interior.
    """

    x: np.ndarray
    s: np.ndarray
    w: TargetPoint
    r: np.ndarray
    rho: float
    r_hat: np.ndarray

    @classmethod
    def from_point(cls, x, s, w: TargetPoint) -> "Iterate":
        x = np.asarray(x, dtype=float)
        s = np.asarray(s, dtype=float)
        if x.size and (x.min() <= 0.0 or s.min() <= 0.0):
            worst = int(np.argmin(np.minimum(x, s)))
            raise NotInteriorPoint(
                f"component {worst} of (x, s) is not strictly positive",
                index=worst)
        r, rho, r_hat = residuals(x, s, w)
        return cls(x=x, s=s, w=w, r=r, rho=rho, r_hat=r_hat)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def v0(self) -> float:
        return self.w.v0

    @property
    def xts(self) -> float:
        """Complementarity gap x^T s."""
        return float(self.x @ self.s)


@dataclass(frozen=True)
class ProximityReport:
    """Closeness of a lifted point to the center of its target."""

    zeta0: float
    zeta1: float
    zeta2: float
    delta: float
    psi: float


def proximities(it: Iterate) -> ProximityReport:
    """All five proximity measures of an iterate."""
    rh2 = it.r / it.rho
    inv2 = it.rho / it.r
    zeta0_sq = float(np.sum((it.r_hat - 1.0 / it.r_hat) ** 2))
    zeta1 = float(np.linalg.norm(inv2 - 1.0))
    zeta2 = float(np.linalg.norm(rh2 - 1.0))
    delta = zeta0_sq / zeta1 if zeta1 > 0.0 else 0.0
    psi = float(-np.sum(np.log(rh2)))
    return ProximityReport(zeta0=math.sqrt(zeta0_sq), zeta1=zeta1,
                           zeta2=zeta2, delta=delta, psi=psi)


def barrier_value(it: Iterate) -> float:
    """F(z) = -sum(ln r_i) over the n+1 residuals."""
    return float(-np.sum(np.log(it.r)))


def control_value(w: TargetPoint) -> float:
    """phi(w) = -(n+1) ln rho(w): the barrier value at the center of w."""
    return -(w.n + 1) * math.log(w.rho)


def merit(w: TargetPoint) -> float:
    """Merit v0^2/(v0 - ||v||^2); decreases strictly across predictor steps."""
    return w.v0 * w.v0 / (w.v0 - w.vnorm2)


def boundary_coefficient(w: TargetPoint) -> float:
    """Scaling margin v0/||v||^2 of w to the target-set boundary (inf at v=0).

    The scaled targets alpha*w stay interior exactly for
    alpha in (0, boundary_coefficient(w)).
    """
    if w.vnorm2 == 0.0:
        return math.inf
    return w.v0 / w.vnorm2
