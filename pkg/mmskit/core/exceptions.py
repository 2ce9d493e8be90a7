"""Custom exceptions for mmskit."""

from typing import Any, Optional


class MMSError(Exception):
    """Base exception for all mmskit errors."""
    pass


class ValidationError(MMSError):
    """Raised when input validation fails."""
    pass


class PreconditionError(MMSError):
    """Raised when the hypothesis of a checked bound is not met."""
    pass


class BoundViolationError(MMSError):
    """Raised when a proved bound fails on a concrete input."""

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


class BudgetExceededError(MMSError):
    """Raised when a search or enumeration exceeds its configured budget."""
    pass


class SolverError(MMSError):
    """Raised when an LP solution fails exact re-substitution."""
    pass
