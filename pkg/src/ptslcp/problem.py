"""Monotone LCP instances, the random generator, and problem file I/O.

An instance asks for x, s >= 0 with -Mx + s = q and x_i s_i = 0, where M
is positive semidefinite (monotone). Generated instances are built as
M = A A^T + eta (L - L^T) with uniform A and strictly-lower-triangular L,
and q is defined so a drawn positive pair (x_hat, s_hat) is strictly
feasible.

File format (JSON): {"n": int, "M": [n*n reals, row-major], "q": [n reals]}
with optional "x0" and "s0" arrays holding a strictly feasible start.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (DimensionMismatch, NonPositiveInput, NotStrictlyFeasible,
                     ParseError)

# Relative tolerance for the affine feasibility check.
FEASIBILITY_RTOL = 1e-9


@dataclass(frozen=True)
class LcpProblem:
    """A monotone LCP instance: find x, s >= 0, -Mx + s = q, x.s = 0."""

    n: int
    M: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.M, dtype=float)
        q = np.asarray(self.q, dtype=float)
        if self.n < 1:
            raise DimensionMismatch(f"n must be >= 1, got {self.n}")
        if M.shape != (self.n, self.n):
            raise DimensionMismatch(
                f"M has shape {M.shape}, expected ({self.n}, {self.n})")
        if q.shape != (self.n,):
            raise DimensionMismatch(
                f"q has shape {q.shape}, expected ({self.n},)")
        if not (np.all(np.isfinite(M)) and np.all(np.isfinite(q))):
            raise DimensionMismatch("M and q must be finite")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "q", q)


@dataclass(frozen=True)
class FeasiblePair:
    """A strictly positive pair (x, s) satisfying -Mx + s = q."""

    x: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        s = np.asarray(self.s, dtype=float)
        if x.shape != s.shape or x.ndim != 1:
            raise DimensionMismatch(
                f"start shapes {x.shape} and {s.shape} are inconsistent")
        if x.size and (x.min() <= 0.0 or s.min() <= 0.0):
            raise NonPositiveInput("starting pair must be strictly positive")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "s", s)


@dataclass(frozen=True)
class GeneratorConfig:
    """Parameters of the random instance generator."""

    n: int
    eta: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise DimensionMismatch(f"generator needs n >= 2, got {self.n}")
        if not (self.eta >= 0.0 and np.isfinite(self.eta)):
            raise DimensionMismatch(f"eta must be finite and >= 0, got {self.eta}")


def _positive_uniform(rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniform (0,1) draws; redraw the (measure-zero) exact zeros."""
    u = rng.random(size)
    while True:
        zero = u == 0.0
        if not zero.any():
            return u
        u[zero] = rng.random(int(zero.sum()))


def generate_random(cfg: GeneratorConfig) -> tuple[LcpProblem, FeasiblePair]:
    """Draw a random monotone instance with a known interior starting pair.

    Draw order is fixed (x_hat, s_hat, A, L) with a PCG64 stream seeded by
    cfg.seed, so instances are bit-reproducible for a given seed.
    """
    n = cfg.n
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    x_hat = _positive_uniform(rng, n)
    s_hat = _positive_uniform(rng, n)
    a = rng.random((n, n))
    l = np.tril(rng.random((n, n)), -1)
    m = a @ a.T + cfg.eta * (l - l.T)
    q = s_hat - m @ x_hat
    return LcpProblem(n=n, M=m, q=q), FeasiblePair(x=x_hat, s=s_hat)


def feasibility_residual(p: LcpProblem, x, s) -> float:
    """Max-norm of -Mx + s - q."""
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    if x.shape != (p.n,) or s.shape != (p.n,):
        raise DimensionMismatch(
            f"point shapes {x.shape}/{s.shape} do not match n={p.n}")
    return float(np.abs(-p.M @ x + s - p.q).max())


def check_strictly_feasible(p: LcpProblem, x, s) -> FeasiblePair:
    """Validate a start: strictly positive and affine-feasible for p."""
    pair = FeasiblePair(x=np.asarray(x, float), s=np.asarray(s, float))
    if pair.x.shape != (p.n,):
        raise DimensionMismatch(
            f"start length {pair.x.shape[0]} does not match n={p.n}")
    tol = FEASIBILITY_RTOL * (1.0 + float(np.abs(p.q).max(initial=0.0)))
    res = feasibility_residual(p, pair.x, pair.s)
    if res > tol:
        raise NotStrictlyFeasible(
            f"affine residual {res:.3e} exceeds tolerance {tol:.3e}")
    return pair


def looks_monotone(p: LcpProblem, *, trials: int = 100, seed: int = 0) -> bool:
    """Monte-Carlo advisory check that u^T M u >= 0 for random u."""
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(trials):
        u = rng.standard_normal(p.n)
        if float(u @ (p.M @ u)) < -1e-10 * float(u @ u):
            return False
    return True


def _require(condition: bool, message: str):
    if not condition:
        raise ParseError(message)


def read_problem(path) -> tuple[LcpProblem, FeasiblePair | None]:
    """Load a problem file; returns the instance and its optional start."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno,
                         column=exc.colno) from exc
    _require(isinstance(doc, dict), "top-level value must be an object")
    for key in ("n", "M", "q"):
        _require(key in doc, f"missing required key {key!r}")
    n = doc["n"]
    _require(isinstance(n, int) and not isinstance(n, bool) and n >= 1,
             f"n must be a positive integer, got {n!r}")
    m_entries = doc["M"]
    q_entries = doc["q"]
    _require(isinstance(m_entries, list) and len(m_entries) == n * n,
             f"M must be a flat row-major list of n*n = {n * n} reals")
    _require(isinstance(q_entries, list) and len(q_entries) == n,
             f"q must be a list of n = {n} reals")
    try:
        m = np.asarray(m_entries, dtype=float).reshape(n, n)
        q = np.asarray(q_entries, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"non-numeric entry in M or q: {exc}") from exc
    try:
        problem = LcpProblem(n=n, M=m, q=q)
    except DimensionMismatch as exc:
        raise ParseError(str(exc)) from exc

    start = None
    if ("x0" in doc) != ("s0" in doc):
        raise ParseError("x0 and s0 must be given together")
    if "x0" in doc:
        x0, s0 = doc["x0"], doc["s0"]
        _require(isinstance(x0, list) and len(x0) == n,
                 f"x0 must be a list of n = {n} reals")
        _require(isinstance(s0, list) and len(s0) == n,
                 f"s0 must be a list of n = {n} reals")
        try:
            start = check_strictly_feasible(problem, x0, s0)
        except (NonPositiveInput, NotStrictlyFeasible) as exc:
            raise ParseError(f"invalid starting pair: {exc}") from exc

    if not looks_monotone(problem):
        warnings.warn("problem matrix failed the random monotonicity probe; "
                      "the solver assumes a monotone instance",
                      stacklevel=2)
    return problem, start


def write_problem(p: LcpProblem, path, start: FeasiblePair | None = None):
    """Write a problem (and optional start) in the JSON file format."""
    doc: dict = {
        "n": p.n,
        "M": [float(v) for v in p.M.ravel()],
        "q": [float(v) for v in p.q],
    }
    if start is not None:
        if start.x.shape != (p.n,):
            raise DimensionMismatch(
                f"start length {start.x.shape[0]} does not match n={p.n}")
        doc["x0"] = [float(v) for v in start.x]
        doc["s0"] = [float(v) for v in start.s]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")
