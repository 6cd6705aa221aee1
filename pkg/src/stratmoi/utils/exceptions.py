"""Custom exceptions for stratmoi."""

from typing import Optional


class StratMoiError(Exception):
    """Base exception for stratmoi."""

    exit_status = 1


class ConfigurationError(StratMoiError):
    """Raised when the run configuration cannot be parsed or validated."""

    exit_status = 2

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(StratMoiError):
    """Raised when a stratification profile violates one of its invariants."""

    def __init__(self, invariant: str, message: str, location: Optional[float] = None):
        self.invariant = invariant
        self.location = location
        where = f" at y={location:.6g}" if location is not None else ""
        super().__init__(f"[{invariant}] {message}{where}")


class DomainError(StratMoiError):
    """Raised when an argument lies outside the domain of an operation."""
    pass


class DensityRangeError(StratMoiError):
    """Raised when a density lies outside the range where its inverse is defined."""
    pass


class SolverError(StratMoiError):
    """Raised when the vertical mode solver cannot identify the requested mode."""
    pass


class NumericalError(StratMoiError):
    """Raised on non-convergence or non-finite numerical output."""
    pass


class DegenerateNonlinearityError(StratMoiError):
    """Raised when a genericity integral is below threshold."""
    pass


class ConventionError(StratMoiError):
    """Raised when the dispersive coefficient has the wrong sign."""
    pass


class InvariantViolation(StratMoiError):
    """Raised when a numerical invariant fails."""

    def __init__(self, invariant: str, message: str):
        self.invariant = invariant
        super().__init__(f"[{invariant}] {message}")


class AmplitudeTooLargeError(StratMoiError):
    """Raised when a constructed wave has non-positive density."""
    pass


class TruncationError(StratMoiError):
    """Raised in strict mode when a wave has not decayed at the domain ends."""
    pass


class StepError(StratMoiError):
    """Raised when a speed step would leave the wave branch."""
    pass


__all__ = [
    "StratMoiError",
    "ConfigurationError",
    "ValidationError",
    "DomainError",
    "DensityRangeError",
    "SolverError",
    "NumericalError",
    "DegenerateNonlinearityError",
    "ConventionError",
    "InvariantViolation",
    "AmplitudeTooLargeError",
    "TruncationError",
    "StepError",
]
