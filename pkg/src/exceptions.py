"""
Error hierarchy shared by every package.

Each error carries a stable ``code`` so the CLI and the HTTP server can
report failures in a machine-readable way.
"""
from typing import Optional


class FwfError(Exception):
    """Base class for all toolkit errors."""

    code = "fwf_error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def to_dict(self) -> dict:
        return {"error": self.code, "message": self.message}


class InvalidInputError(FwfError, ValueError):
    """Bad shapes, lengths, non-finite values or out-of-range indices."""

    code = "invalid_input"


class CapacityError(FwfError):
    """An enumeration would exceed the configured size guard."""

    code = "capacity_exceeded"


class PsdViolationError(FwfError):
    """A matrix that must be PSD has a clearly negative eigenvalue."""

    code = "psd_violation"


class ModelFormatError(FwfError):
    """A model file is truncated, corrupt or of an unknown version."""

    code = "model_format"


class IntegrationError(FwfError):
    """An ODE/DDE integration diverged."""

    code = "integration_diverged"


class ConditioningError(FwfError):
    """A Gram solve failed; carries a suggested larger regularizer."""

    code = "conditioning"

    def __init__(self, message: str, suggested_lambda: Optional[float] = None):
        super().__init__(message)
        self.suggested_lambda = suggested_lambda


class FilterDivergedError(FwfError):
    """A fitted filter's error is non-finite or far beyond the target power."""

    code = "filter_diverged"


class InsufficientDataError(FwfError, ValueError):
    """Not enough samples for the requested windows or folds."""

    code = "insufficient_data"


class CsvFormatError(FwfError, ValueError):
    """A CSV file has a malformed or non-numeric row."""

    code = "csv_format"

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class MissingAxisError(FwfError):
    """A report lacks a column needed by a figure table."""

    code = "missing_axis"

    def __init__(self, message: str, column: str):
        super().__init__(message)
        self.column = column


class ConfigError(FwfError, ValueError):
    """An experiment configuration file failed validation."""

    code = "config_invalid"
