"""Centralized logging configuration for zero-coref."""

import json
import logging
import sys
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

from zero_coref.core.config import settings

# LogRecord attributes that are not user supplied ``extra`` fields
_RESERVED_ATTRS = frozenset(logging.makeLogRecord({}).__dict__) | {"message", "asctime"}


class ColoredFormatter(logging.Formatter):
    """Colored log formatter for console output."""

    COLORS = {
        "DEBUG": "\033[36m",  # Cyan
        "INFO": "\033[32m",  # Green
        "WARNING": "\033[33m",  # Yellow
        "ERROR": "\033[31m",  # Red
        "CRITICAL": "\033[35m",  # Magenta
    }
    RESET = "\033[0m"

    def format(self, record: logging.LogRecord) -> str:
        """Format log record with colors."""
        record = logging.makeLogRecord(record.__dict__)
        log_color = self.COLORS.get(record.levelname, self.RESET)
        record.levelname = f"{log_color}{record.levelname}{self.RESET}"
        return super().format(record)


class JsonFormatter(logging.Formatter):
    """One JSON object per record, with ``extra`` fields inlined."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as a JSON line."""
        payload: dict[str, Any] = {
            "ts": datetime.fromtimestamp(record.created, tz=UTC).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        for key, value in record.__dict__.items():
            if key not in _RESERVED_ATTRS and not key.startswith("_"):
                payload[key] = value
        if record.exc_info:
            payload["exc_info"] = self.formatException(record.exc_info)
        return json.dumps(payload, ensure_ascii=False, default=str)


def setup_logging(
    level: str | None = None, json_output: bool | None = None, log_file: str | None = None
) -> None:
    """Setup toolkit logging with a console handler and an optional file handler.

    Console output goes to stderr so that command results on stdout stay parseable.

    Args:
        level: Log level name (defaults to settings value, DEBUG in debug mode)
        json_output: Emit JSON lines instead of colored text (defaults to settings)
        log_file: Optional path of a detailed log file (defaults to settings)
    """
    level_name = level or ("DEBUG" if settings.debug else settings.log_level)
    use_json = settings.log_json if json_output is None else json_output
    file_path = log_file if log_file is not None else settings.log_file

    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG)

    # Remove existing handlers
    root_logger.handlers.clear()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level_name.upper())
    if use_json:
        console_handler.setFormatter(JsonFormatter())
    elif sys.stderr.isatty():
        console_handler.setFormatter(
            ColoredFormatter(
                "%(asctime)s | %(levelname)s | %(name)s | %(message)s",
                datefmt="%Y-%m-%d %H:%M:%S",
            )
        )
    else:
        console_handler.setFormatter(
            logging.Formatter("%(asctime)s | %(levelname)s | %(name)s | %(message)s")
        )
    root_logger.addHandler(console_handler)

    if file_path:
        log_path = Path(file_path)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_path, encoding="utf-8")
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(
            logging.Formatter(
                "%(asctime)s | %(levelname)8s | %(name)30s | %(funcName)20s:%(lineno)4d | "
                "%(message)s",
                datefmt="%Y-%m-%d %H:%M:%S",
            )
        )
        root_logger.addHandler(file_handler)

    logger = logging.getLogger(__name__)
    logger.debug(f"Logging initialized - level: {level_name}, json: {use_json}")


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance with the given name.

    Args:
        name: Logger name (typically __name__)

    Returns:
        Logger instance
    """
    return logging.getLogger(name)


def log_exception(
    logger: logging.Logger, exc: Exception, context: dict[str, Any] | None = None
) -> None:
    """Log an exception with context.

    Args:
        logger: Logger instance
        exc: Exception to log
        context: Additional context to log
    """
    logger.error(f"{type(exc).__name__}: {exc}", extra={"context": context or {}})
    if settings.debug:
        logger.exception("Stack trace:")


def log_command(command: str, exit_code: int, duration_ms: float, **kwargs: Any) -> None:
    """Log the outcome of a CLI command.

    Args:
        command: Sub-command name
        exit_code: Exit status returned to the shell
        duration_ms: Command duration in milliseconds
        **kwargs: Additional structured fields
    """
    logger = get_logger("zero_coref.cli")
    level = logging.INFO if exit_code == 0 else logging.ERROR
    logger.log(
        level,
        f"{command} | Exit: {exit_code} | Duration: {duration_ms:.2f}ms",
        extra={"command": command, "exit_code": exit_code, **kwargs},
    )


def log_reject(doc_id: str, chain_id: int | None, reason: str, detail: str = "") -> None:
    """Log an AZP that was skipped while building the extended dataset.

    Args:
        doc_id: Document identifier
        chain_id: ONF chain the AZP belongs to
        reason: Reject reason code
        detail: Human-readable detail
    """
    logger = get_logger("zero_coref.merge")
    logger.warning(
        f"Skipped AZP in {doc_id} chain {chain_id}: {reason} {detail}".rstrip(),
        extra={"doc_id": doc_id, "chain_id": chain_id, "reason": reason},
    )
