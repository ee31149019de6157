"""
Configuration package for the FWF toolkit.

This package provides centralized configuration management, constants,
and logging setup for the application.
"""

from .settings import Settings, get_settings, reload_settings
from .constants import (
    FigureId,
    MethodName,
    NoiseStdMode,
    NormalizationMode,
    SeriesKind,
)
from .logging_config import configure_from_settings, setup_logging, get_logger, LoggerMixin

__all__ = [
    # Settings
    "Settings",
    "get_settings",
    "reload_settings",
    # Constants
    "FigureId",
    "MethodName",
    "NoiseStdMode",
    "NormalizationMode",
    "SeriesKind",
    # Logging
    "configure_from_settings",
    "setup_logging",
    "get_logger",
    "LoggerMixin",
]
