"""Error handling and logging utilities."""

import traceback
from datetime import datetime
from functools import wraps
from pathlib import Path
from typing import Optional

from .logger import get_logger


class ErrorLedger:
    """Records structured error entries to the logger and optionally to a file."""

    def __init__(self, log_file: Optional[str] = None):
        self.log_file = Path(log_file) if log_file else None
        self.logger = get_logger(__name__)

    def configure(self, log_file: Optional[str]) -> None:
        """Point the ledger at a file, or detach it with None."""
        self.log_file = Path(log_file) if log_file else None

    def log_error(self, module: str, error_type: str, description: str,
                  solution: Optional[str] = None, exception: Optional[Exception] = None):
        """Log an error entry.

        Args:
            module: Module where the error occurred
            error_type: Type of error (e.g. SolverError, ConfigurationError)
            description: Description of the error
            solution: Remedy applied or suggested (if any)
            exception: The exception object (if any)
        """
        self.logger.error(f"[{module}] {error_type}: {description}")

        if self.log_file is None:
            return

        timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        entry = f"\n[{timestamp}] [{module}] [{error_type}] {description}"
        if exception:
            entry += f"\nException: {type(exception).__name__}: {exception}"
            entry += f"\nTraceback:\n{traceback.format_exc()}"
        if solution:
            entry += f"\nSolution: {solution}"
        entry += "\n" + "-" * 80

        try:
            self.log_file.parent.mkdir(parents=True, exist_ok=True)
            with open(self.log_file, 'a', encoding='utf-8') as f:
                f.write(entry + "\n")
        except OSError as e:
            self.logger.error(f"Failed to write to error log: {e}")


# Global ledger instance; file output is off until configured
error_ledger = ErrorLedger()


def handle_errors(module: str):
    """Decorator to log and re-raise errors in public operations.

    Args:
        module: Module name for error logging
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except Exception as e:
                error_ledger.log_error(
                    module=module,
                    error_type=type(e).__name__,
                    description=f"Error in {func.__name__}: {e}",
                    exception=e
                )
                raise
        return wrapper
    return decorator
