"""Exception types shared across the package.

Every error raised by the library derives from PtsLcpError so callers
(CLI, HTTP service, batch runner) can catch one base type. Solver-loop
failures carry the partial trace on a ``trace`` attribute when one exists.
"""

from __future__ import annotations


class PtsLcpError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(PtsLcpError, ValueError):
    """Array shapes are inconsistent with each other or not finite."""


class SingularMatrix(PtsLcpError):
    """A pivot fell below the relative singularity threshold."""


class SingularNewtonMatrix(SingularMatrix):
    """The Newton system matrix S + XM could not be factored."""


class SingularBlock(PtsLcpError):
    """The principal block M_BB of the terminal partition is singular."""


class ParseError(PtsLcpError, ValueError):
    """A problem file is malformed.

    ``line`` and ``column`` are set when the failure came from the JSON
    decoder; semantic failures (wrong lengths, bad types) leave them None.
    """

    def __init__(self, message: str, line: int | None = None,
                 column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class NonPositiveInput(PtsLcpError, ValueError):
    """An input that must be strictly positive has a zero or negative entry."""


class NotInteriorPoint(PtsLcpError):
    """A lifted point left the strict interior (some residual <= 0)."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class NotStrictlyFeasible(PtsLcpError, ValueError):
    """A starting pair violates -Mx + s = q or strict positivity."""


class DomainError(PtsLcpError, ValueError):
    """Argument outside the domain of a scalar convexity function."""


class StalledPredictor(PtsLcpError):
    """The predictor step search could not make progress."""


class StalledCorrector(PtsLcpError):
    """A corrector step produced no barrier decrease."""


class CorrectorBudgetExceeded(PtsLcpError):
    """The inner corrector loop exceeded its step budget."""


class BudgetExceeded(PtsLcpError):
    """The outer predictor loop exceeded its iteration budget."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class NumericalFailure(PtsLcpError):
    """A lower-level numerical error occurred during a solve."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class AuditViolation(PtsLcpError):
    """A runtime theory oracle failed in audit mode (indicates a bug)."""
