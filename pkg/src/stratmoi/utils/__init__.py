"""Utility modules for the project."""

from .logger import setup_logger, get_logger, LoggerMixin
from .exceptions import *
from .error_handler import error_ledger, handle_errors
from .config import Config, SCHEMA_VERSION

__all__ = [
    "setup_logger",
    "get_logger",
    "LoggerMixin",
    "Config",
    "SCHEMA_VERSION",
    "error_ledger",
    "handle_errors",
]
