"""Dense linear algebra for the Newton systems.

Conventions: vectors are 1-D float64 numpy arrays, matrices are square 2-D
float64 arrays in row-major order. Factorization work is delegated to
LAPACK's LU with partial pivoting; this module adds the shape and
finiteness validation plus the relative singularity guard the solver
relies on (|pivot| < PIVOT_RTOL * max|A| is treated as singular).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, SingularMatrix

# Pivot threshold relative to the largest entry of the factored matrix.
PIVOT_RTOL = 1e-14


def as_vector(entries, *, name: str = "vector") -> np.ndarray:
    """Validate and convert to a finite 1-D float64 array."""
    v = np.asarray(entries, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-D, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise DimensionMismatch(f"{name} has non-finite entries")
    return v


def as_square_matrix(entries, *, name: str = "matrix") -> np.ndarray:
    """Validate and convert to a finite square 2-D float64 array."""
    a = np.asarray(entries, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DimensionMismatch(f"{name} has non-finite entries")
    return a


@dataclass(frozen=True)
class LuFactors:
    """LU factorization PA = LU in LAPACK's packed form."""

    lu: np.ndarray
    piv: np.ndarray
    n: int


def lu_factor(a) -> LuFactors:
    """Factor a square matrix, raising SingularMatrix on tiny pivots."""
    a = as_square_matrix(a)
    n = a.shape[0]
    scale = float(np.abs(a).max()) if n else 0.0
    if scale == 0.0:
        raise SingularMatrix("matrix is identically zero")
    with warnings.catch_warnings():
        # scipy warns on an exactly zero pivot; the guard below turns that
        # case into SingularMatrix, so the warning is redundant noise.
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    smallest = float(pivots.min())
    if smallest < PIVOT_RTOL * scale:
        raise SingularMatrix(
            f"pivot {smallest:.3e} below threshold "
            f"{PIVOT_RTOL * scale:.3e} (n={n})")
    return LuFactors(lu=lu, piv=piv, n=n)


def lu_solve(factors: LuFactors, b) -> np.ndarray:
    """Solve A x = b given the factorization of A."""
    b = as_vector(b, name="rhs")
    if b.shape[0] != factors.n:
        raise DimensionMismatch(
            f"rhs length {b.shape[0]} != system size {factors.n}")
    return scipy.linalg.lu_solve((factors.lu, factors.piv), b,
                                 check_finite=False)


def solve(a, b) -> np.ndarray:
    """One-shot factor-and-solve convenience."""
    return lu_solve(lu_factor(a), b)
