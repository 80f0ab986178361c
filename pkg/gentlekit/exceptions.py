from typing import Any, Dict, Optional

from gentlekit.schemas.errors import ErrorResponse, ErrorType

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_INPUT_ERROR = 2


class AppException(Exception):
    """Base exception class for toolkit-specific exceptions"""
    error_type = ErrorType.INTERNAL_ERROR

    def __init__(self, message: str, exit_code: int, details: Optional[Dict[str, Any]] = None):
        self.message = message
        self.exit_code = exit_code
        self.details = details or {}
        super().__init__(message)


# --- Input errors (exit code 2) ---

class InputError(AppException):
    """Raised when user-supplied input cannot be accepted"""
    error_type = ErrorType.BAD_REQUEST

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, exit_code=EXIT_INPUT_ERROR, details=details)


class ParseError(InputError):
    """Raised when a .bq, .ang, string or potential source is malformed"""

    def __init__(self, message: str, line: int = 0, column: int = 0,
                 details: Optional[Dict[str, Any]] = None):
        self.line = line
        self.column = column
        merged = {"line": line, "column": column}
        merged.update(details or {})
        super().__init__(f"{message} (line {line}, column {column})", details=merged)


class ValidationError(InputError):
    """Raised when input validation fails"""
    error_type = ErrorType.VALIDATION_ERROR


class FieldError(ValidationError):
    """Raised when a field characteristic is refused"""


class NotAdmissibleError(ValidationError):
    """Raised when an operation needs a finite-dimensional algebra"""


class PreconditionError(ValidationError):
    """Raised when an algebra lacks a property the operation requires (gentle, string, ...)"""


class BlockRuleError(ValidationError):
    """Raised when a block matching breaks one of the gluing rules"""

    def __init__(self, rule: str, message: str, details: Optional[Dict[str, Any]] = None):
        self.rule = rule
        merged = {"rule": rule}
        merged.update(details or {})
        super().__init__(f"{rule}: {message}", details=merged)


class AngulationError(ValidationError):
    """Raised when an arc family is not an angulation or cannot be sampled"""


# --- Computation errors (exit code 1) ---

class ComputationError(AppException):
    """Raised when a computation cannot produce a trustworthy answer"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, exit_code=EXIT_VERIFICATION_FAILED, details=details)


class CutoffExceededError(ComputationError):
    """Raised when a resolution is needed beyond the configured cutoff"""


class DecompositionError(ComputationError):
    """Raised when a representation cannot be split into known string summands"""


class ConsistencyError(ComputationError):
    """Raised when two independent computations of the same quantity disagree"""


class VerificationFailure(ComputationError):
    """Raised when a checked property does not hold for one instance"""


def error_response_from_exception(exc: Exception) -> ErrorResponse:
    """Render an exception as the JSON error document printed by --json runs."""
    if isinstance(exc, AppException):
        return ErrorResponse.create(
            error_type=exc.error_type,
            message=exc.message,
            suggestion=_suggestion_for(exc),
            meta={"exit_code": exc.exit_code, **exc.details},
        )
    return ErrorResponse.internal_error(message=f"Unexpected error: {exc}")


def _suggestion_for(exc: AppException) -> Optional[str]:
    if isinstance(exc, ParseError):
        return "Check the input file against the documented format"
    if isinstance(exc, FieldError):
        return "Use characteristic 0 or a prime different from 3"
    if isinstance(exc, CutoffExceededError):
        return "Increase --cutoff and try again"
    if isinstance(exc, PreconditionError):
        return "Run 'analyze' to see which conditions the algebra satisfies"
    return None
