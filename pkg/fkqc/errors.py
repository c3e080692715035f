"""
Exception hierarchy for fkqc.

Validation problems are ``ValueError`` subclasses, numerical failures are
``RuntimeError`` subclasses; the CLI maps the two families to exit codes 1 and 2.
"""

from typing import List, Optional


class FKQCError(Exception):
    """Base class for all fkqc errors."""


class ValidationError(FKQCError, ValueError):
    """Bad argument or violated precondition."""


class WindowError(ValidationError):
    """A requested index range exceeds the materialisation cap or the window."""


class PreconditionError(ValidationError):
    """An operation was called outside the region where it is defined."""


class ContractionError(ValidationError):
    """The contraction guarantee of the anti-integrable solver does not hold."""


class InsufficientWindowError(ValidationError):
    """A certificate needs more super-intervals than the window covers."""


class NumericalError(FKQCError, RuntimeError):
    """A numerical procedure failed."""


class ConvergenceError(NumericalError):
    """An iteration hit its cap before reaching the tolerance."""

    def __init__(self, message: str, best=None, deltas: Optional[List[float]] = None):
        super().__init__(message)
        self.best = best
        self.deltas = list(deltas or [])
