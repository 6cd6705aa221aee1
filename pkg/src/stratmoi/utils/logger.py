"""Logging configuration and utilities."""

import logging
import sys
from pathlib import Path
from typing import List, Optional

try:
    import colorlog
    HAS_COLORLOG = True
except ImportError:
    HAS_COLORLOG = False


DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DEBUG_FORMAT = "%(asctime)s - %(name)s:%(lineno)d - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# numpy and scipy report ill-conditioned solves and overflow as warnings
WARNINGS_LOGGER = "py.warnings"


def _console_handler(level: int, format_string: str) -> logging.Handler:
    """stderr handler, coloured when colorlog is available."""
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(level)
    if HAS_COLORLOG:
        handler.setFormatter(colorlog.ColoredFormatter(
            "%(log_color)s" + format_string,
            datefmt=DATE_FORMAT,
            log_colors={
                'DEBUG': 'cyan',
                'INFO': 'green',
                'WARNING': 'yellow',
                'ERROR': 'red',
                'CRITICAL': 'red,bg_white',
            }
        ))
    else:
        handler.setFormatter(logging.Formatter(format_string, datefmt=DATE_FORMAT))
    return handler


def setup_logger(
    name: str = "stratmoi",
    level: str = "INFO",
    log_file: Optional[str] = None,
    format_string: Optional[str] = None,
    capture_warnings: bool = True
) -> logging.Logger:
    """Set up a logger with console and optional file output.

    Console output goes to stderr so that JSON printed on stdout by the
    CLI stays machine-readable. At DEBUG the default format adds the source
    line, which locates the residual traces of the wave corrector and the
    branch sweep.

    Args:
        name: Logger name
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optional log file path
        format_string: Optional custom format string
        capture_warnings: Route Python warnings (numpy/scipy numerics) to the same handlers

    Returns:
        Configured logger instance
    """
    numeric_level = getattr(logging, level.upper())
    logger = logging.getLogger(name)
    logger.setLevel(numeric_level)
    logger.handlers.clear()

    if not format_string:
        format_string = DEBUG_FORMAT if numeric_level <= logging.DEBUG else DEFAULT_FORMAT

    handlers: List[logging.Handler] = [_console_handler(numeric_level, format_string)]

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(log_path, encoding='utf-8')
        file_handler.setLevel(numeric_level)
        file_handler.setFormatter(logging.Formatter(format_string, datefmt=DATE_FORMAT))
        handlers.append(file_handler)

    for handler in handlers:
        logger.addHandler(handler)

    logging.captureWarnings(capture_warnings)
    warnings_logger = logging.getLogger(WARNINGS_LOGGER)
    warnings_logger.handlers.clear()
    if capture_warnings:
        for handler in handlers:
            warnings_logger.addHandler(handler)

    return logger


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance.

    Args:
        name: Logger name (usually __name__)

    Returns:
        Logger instance
    """
    return logging.getLogger(name)


class LoggerMixin:
    """Mixin class to add logging capabilities to other classes."""

    @property
    def logger(self) -> logging.Logger:
        """Get logger for this class."""
        if not hasattr(self, '_logger'):
            self._logger = get_logger(self.__class__.__module__)
        return self._logger
