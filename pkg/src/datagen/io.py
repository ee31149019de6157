"""
CSV ingestion, normalization and export of series.
"""
from pathlib import Path
from typing import Tuple, Union
import io
import logging
import re

import numpy as np
import pandas as pd

from ..config.constants import NormalizationMode
from ..exceptions import CsvFormatError, InvalidInputError

logger = logging.getLogger(__name__)

_PARSER_LINE = re.compile(r"line (\d+)")


def _is_number(value) -> bool:
    try:
        float(value)
    except (TypeError, ValueError):
        return False
    return True


def load_csv(path: Union[str, Path], column: Union[int, str] = 0) -> np.ndarray:
    """
    Read one numeric column of a comma-separated file.

    A header row is detected when the first row of the chosen column is not a
    number; naming the column by string requires one.

    Raises:
        InvalidInputError: Missing or unreadable file
        CsvFormatError: Undecodable, malformed, non-numeric or non-finite row (with its line)
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except FileNotFoundError:
        raise InvalidInputError(f"CSV file not found: {path}")
    except OSError as e:
        raise InvalidInputError(f"cannot read CSV file {path}: {e.strerror or e}")
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        line = data.count(b"\n", 0, e.start) + 1
        raise CsvFormatError(f"invalid UTF-8 byte 0x{data[e.start]:02x}", line=line)
    if text.startswith("\ufeff"):
        text = text[1:]

    try:
        frame = pd.read_csv(
            io.StringIO(text),
            header=None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
        )
    except pd.errors.EmptyDataError:
        raise CsvFormatError("file is empty")
    except pd.errors.ParserError as e:
        match = _PARSER_LINE.search(str(e))
        raise CsvFormatError(f"malformed row ({e})", line=int(match.group(1)) if match else None)

    if frame.empty:
        raise CsvFormatError("file is empty")

    first_row = [str(value).strip() for value in frame.iloc[0]]
    if isinstance(column, str):
        if column not in first_row:
            raise CsvFormatError(f"column '{column}' not found in header", line=1)
        index = first_row.index(column)
        has_header = True
    else:
        index = column
        if not 0 <= index < frame.shape[1]:
            raise CsvFormatError(f"column {index} out of range (file has {frame.shape[1]})", line=1)
        has_header = not _is_number(first_row[index])

    raw = frame.iloc[1:, index] if has_header else frame.iloc[:, index]
    values = np.empty(len(raw), dtype=float)
    for position, (row, cell) in enumerate(raw.items()):
        line = int(row) + 1
        text = "" if cell is None or (isinstance(cell, float) and np.isnan(cell)) else str(cell).strip()
        if not _is_number(text):
            raise CsvFormatError(f"non-numeric value '{text}'", line=line)
        value = float(text)
        if not np.isfinite(value):
            raise CsvFormatError(f"non-finite value '{text}'", line=line)
        values[position] = value

    if values.size == 0:
        raise CsvFormatError("file has no data rows")
    logger.info(f"Loaded {values.size} samples from {path} (column {column}, header={has_header})")
    return values


def normalize(
    series,
    train_range: Tuple[int, int],
    mode: NormalizationMode = NormalizationMode.NORM,
) -> Tuple[np.ndarray, float]:
    """
    Scale a series by a statistic of its training slice.

    Args:
        series: Full series
        train_range: Half-open (start, stop) of the training slice
        mode: norm (Euclidean norm), max_abs, std or none

    Returns:
        Tuple of (series / scale, scale)
    """
    series = np.asarray(series, dtype=float)
    start, stop = train_range
    if not 0 <= start < stop <= series.size:
        raise InvalidInputError(f"train range {train_range} outside series of length {series.size}")

    mode = NormalizationMode(mode)
    train = series[start:stop]
    if mode == NormalizationMode.NONE:
        scale = 1.0
    elif mode == NormalizationMode.NORM:
        scale = float(np.linalg.norm(train))
    elif mode == NormalizationMode.MAX_ABS:
        scale = float(np.max(np.abs(train)))
    else:
        scale = float(np.std(train))

    if not np.isfinite(scale) or scale == 0.0:
        raise InvalidInputError(f"cannot normalize: training slice has zero {mode.value} scale")
    return series / scale, scale


def denormalize(series, scale: float) -> np.ndarray:
    """Undo normalize() by multiplying with the stored scale."""
    return np.asarray(series, dtype=float) * scale


def export_series_csv(series, path: Union[str, Path]) -> Path:
    """Write a series as ``index,value`` rows."""
    series = np.asarray(series, dtype=float)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame({"index": np.arange(series.size), "value": series}).to_csv(path, index=False)
    logger.info(f"Wrote {series.size} samples to {path}")
    return path
