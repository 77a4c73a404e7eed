"""Search-direction right-hand sides and the Newton solve.

All directions solve the same linearized system at a lifted iterate:

    -M dx + ds = 0,        S dx + X ds = a,

eliminated to (S + XM) dx = a, ds = M dx. Only the right-hand side a
differs:

    corrector          a = rho e - xs + v^2          (recenter, w fixed)
    universal tangent  a = (||v||^2/(n+1) - rho) e - 2 v^2
    auto-corrector     a = corrector + tangent
                         = (||v||^2/(n+1)) e - v^2 - xs

The monotonicity of M makes dx^T ds = dx^T M dx >= 0 for every direction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import SingularMatrix, SingularNewtonMatrix
from .problem import LcpProblem
from .target_space import Iterate


class DirectionKind(enum.Enum):
    CORRECTOR = "corrector"
    UNIVERSAL_TANGENT = "ut"
    AUTO_CORRECTOR = "ac"


# Kinds usable as predictor directions.
PREDICTOR_KINDS = (DirectionKind.UNIVERSAL_TANGENT,
                   DirectionKind.AUTO_CORRECTOR)


@dataclass(frozen=True)
class SearchDirection:
    """Solution (dx, ds) of the Newton system for right-hand side a."""

    dx: np.ndarray
    ds: np.ndarray
    a: np.ndarray
    kind: DirectionKind


def rhs_corrector(it: Iterate) -> np.ndarray:
    """Recentering right-hand side rho e - xs + v^2 = rho e - r."""
    return it.rho - it.r[1:]


def rhs_universal_tangent(it: Iterate) -> np.ndarray:
    """Tangent right-hand side (||v||^2/(n+1) - rho) e - 2 v^2."""
    w = it.w
    v2 = w.v * w.v
    return (w.vnorm2 / (it.n + 1) - it.rho) - 2.0 * v2


def rhs_auto_corrector(it: Iterate) -> np.ndarray:
    """Combined right-hand side (||v||^2/(n+1)) e - v^2 - xs."""
    w = it.w
    return w.vnorm2 / (it.n + 1) - w.v * w.v - it.x * it.s


def predictor_rhs(it: Iterate, kind: DirectionKind) -> np.ndarray:
    if kind is DirectionKind.UNIVERSAL_TANGENT:
        return rhs_universal_tangent(it)
    if kind is DirectionKind.AUTO_CORRECTOR:
        return rhs_auto_corrector(it)
    raise ValueError(f"{kind} is not a predictor direction")


def newton_matrix(p: LcpProblem, it: Iterate) -> np.ndarray:
    """The eliminated system matrix S + XM."""
    a = p.M * it.x[:, None]
    a[np.diag_indices(p.n)] += it.s
    return a


def solve_newton(p: LcpProblem, it: Iterate, a,
                 kind: DirectionKind) -> SearchDirection:
    """Solve the direction system for right-hand side a."""
    a = linalg.as_vector(a, name="rhs")
    if a.shape[0] != p.n:
        raise linalg.DimensionMismatch(
            f"rhs length {a.shape[0]} does not match n={p.n}")
    try:
        factors = linalg.lu_factor(newton_matrix(p, it))
    except SingularMatrix as exc:
        raise SingularNewtonMatrix(f"Newton matrix is singular: {exc}") from exc
    dx = linalg.lu_solve(factors, a)
    ds = p.M @ dx
    return SearchDirection(dx=dx, ds=ds, a=a, kind=kind)


def corrector_direction(p: LcpProblem, it: Iterate) -> SearchDirection:
    return solve_newton(p, it, rhs_corrector(it), DirectionKind.CORRECTOR)


def predictor_direction(p: LcpProblem, it: Iterate,
                        kind: DirectionKind) -> SearchDirection:
    return solve_newton(p, it, predictor_rhs(it, kind), kind)


@dataclass(frozen=True)
class DirectionBounds:
    """The four product bounds every Newton direction must satisfy.

    With scaled_rhs_sq = ||a / sqrt(xs)||^2 the direction obeys

        ||dx.ds||_inf <= scaled_rhs_sq / 4
        ||dx.ds||_1   <= scaled_rhs_sq / 2
        ||dx.ds||_2   <= scaled_rhs_sq / (2 sqrt(2))
        dx^T ds       <= scaled_rhs_sq / 4
    """

    scaled_rhs_sq: float
    prod_inf: float
    prod_l1: float
    prod_l2: float
    inner: float

    def pairs(self) -> list[tuple[str, float, float]]:
        """(name, lhs, rhs) for each inequality."""
        s = self.scaled_rhs_sq
        return [
            ("inf", self.prod_inf, 0.25 * s),
            ("l1", self.prod_l1, 0.5 * s),
            ("l2", self.prod_l2, s / (2.0 * np.sqrt(2.0))),
            ("inner", self.inner, 0.25 * s),
        ]

    def margins(self) -> dict[str, float]:
        return {name: rhs - lhs for name, lhs, rhs in self.pairs()}

    def satisfied(self, tol: float = 1e-9) -> bool:
        return all(lhs <= rhs + tol * max(1.0, abs(rhs))
                   for _, lhs, rhs in self.pairs())


def direction_bounds(direction: SearchDirection,
                     it: Iterate) -> DirectionBounds:
    """Evaluate the four bounds at the iterate the direction was built at."""
    prod = direction.dx * direction.ds
    scaled = float(np.sum(direction.a * direction.a / (it.x * it.s)))
    return DirectionBounds(
        scaled_rhs_sq=scaled,
        prod_inf=float(np.abs(prod).max()),
        prod_l1=float(np.abs(prod).sum()),
        prod_l2=float(np.linalg.norm(prod)),
        inner=float(direction.dx @ direction.ds),
    )
