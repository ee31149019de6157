"""
Logging setup shared by the CLI and the HTTP server.

stdout carries CSV tables, so every handler installed here writes to stderr
or to a rotating file. Library modules only ask for loggers.
"""

import logging
import sys
from typing import Optional, TYPE_CHECKING
from logging.handlers import RotatingFileHandler
from pathlib import Path

if TYPE_CHECKING:
    from .settings import Settings

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# Chatty at INFO; bench workers and request logs would drown fit summaries
QUIET_LOGGERS = ("joblib", "httpx", "httpcore", "uvicorn.access", "py.warnings")


def setup_logging(
    log_level: str = "INFO",
    log_file: Optional[str] = None,
    max_bytes: int = 10485760,  # 10MB
    backup_count: int = 5
) -> logging.Logger:
    """
    Install the stderr handler (and optional rotating file) on the root logger.

    Safe to call once per CLI invocation: previous handlers are dropped.
    numpy/scipy warnings (LinAlgWarning, overflow in exp) are routed through
    logging so they land in the same stream as the fit summaries.

    Args:
        log_level: DEBUG, INFO, WARNING, ERROR or CRITICAL
        log_file: Optional path; parent directories are created
        max_bytes: Rotation threshold of the file handler
        backup_count: Rotated files to keep

    Returns:
        logging.Logger: The root logger
    """
    level = logging.getLevelName(log_level.upper())
    root = logging.getLogger()
    root.setLevel(level)
    root.handlers.clear()

    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=LOG_DATE_FORMAT)
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(RotatingFileHandler(log_file, maxBytes=max_bytes, backupCount=backup_count))

    for handler in handlers:
        handler.setLevel(level)
        handler.setFormatter(formatter)
        root.addHandler(handler)

    logging.captureWarnings(True)
    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(max(level, logging.WARNING))

    return root


def configure_from_settings(settings: "Settings") -> logging.Logger:
    """setup_logging with the level and file taken from the settings."""
    return setup_logging(log_level=settings.log_level, log_file=settings.log_file)


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)


class LoggerMixin:
    """Per-class logger named <module>.<class>, for long-lived accumulators."""

    @property
    def logger(self) -> logging.Logger:
        cls = type(self)
        return get_logger(f"{cls.__module__}.{cls.__name__}")
