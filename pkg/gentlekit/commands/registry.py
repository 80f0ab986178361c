from typing import Any, Callable, Dict, Generic, List, Optional, TypeVar

from gentlekit.core.logging import get_logger
from gentlekit.exceptions import (
    EXIT_OK,
    EXIT_VERIFICATION_FAILED,
    EXIT_INPUT_ERROR,
    AppException,
    error_response_from_exception,
)
from gentlekit.schemas import AnalysisRequest, ErrorResponse, Report

logger = get_logger(__name__)

T = TypeVar('T')


class CommandResult(Generic[T]):
    """Generic result container for subcommand runs"""
    def __init__(self, success: bool, data: T = None, error: ErrorResponse = None, exit_code: int = EXIT_OK):
        self.success = success
        self.data = data
        self.error = error
        self.exit_code = exit_code

    @classmethod
    def success(cls, data: T, exit_code: int = EXIT_OK) -> 'CommandResult[T]':
        return cls(True, data=data, exit_code=exit_code)

    @classmethod
    def error(cls, error: ErrorResponse, exit_code: int) -> 'CommandResult[T]':
        return cls(False, error=error, exit_code=exit_code)

    def to_dict(self) -> Dict[str, Any]:
        if self.success:
            data = self.data.model_dump(mode="json") if hasattr(self.data, "model_dump") else self.data
            return {"success": True, "data": data}
        # the error document already carries success, error and meta
        return self.error.model_dump(mode="json", exclude_none=True)


class CommandRegistry:
    """Dispatch table for subcommands"""

    def __init__(self):
        self._commands: Dict[str, Callable[[AnalysisRequest], Report]] = {}

    def register_command(self, name: str, handler: Callable[[AnalysisRequest], Report]):
        """Register a new command handler"""
        self._commands[name] = handler
        return handler

    def command(self, name: str):
        """Decorator to register a command handler"""
        def decorator(func):
            self.register_command(name, func)
            return func
        return decorator

    def names(self) -> List[str]:
        return sorted(self._commands)

    def dispatch(self, request: AnalysisRequest) -> CommandResult[Report]:
        """Run the handler for request.command and map its outcome to an exit code."""
        name = request.command.value
        handler: Optional[Callable] = self._commands.get(name)
        if handler is None:
            error = ErrorResponse.not_found(resource=f"Command '{name}'",
                                            suggestion=f"Available commands: {', '.join(self.names())}")
            return CommandResult.error(error, exit_code=EXIT_INPUT_ERROR)

        try:
            report = handler(request)
        except AppException as e:
            logger.error(f"{name} failed: {e.message}")
            return CommandResult.error(error_response_from_exception(e), exit_code=e.exit_code)
        except Exception as e:
            logger.exception(f"Unexpected error in {name}")
            return CommandResult.error(error_response_from_exception(e), exit_code=EXIT_VERIFICATION_FAILED)

        exit_code = EXIT_OK if report.verified else EXIT_VERIFICATION_FAILED
        if exit_code != EXIT_OK:
            logger.info(f"{name}: a requested verification did not hold")
        return CommandResult.success(report, exit_code=exit_code)


# Create a global instance
command_registry = CommandRegistry()


def get_command_registry() -> CommandRegistry:
    """Get the global command registry"""
    return command_registry
