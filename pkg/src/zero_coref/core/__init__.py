"""Core package."""

from zero_coref.core.config import settings
from zero_coref.core.logging import get_logger, log_exception, setup_logging

__all__ = [
    "settings",
    "get_logger",
    "log_exception",
    "setup_logging",
]
