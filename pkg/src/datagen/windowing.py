"""
Windowing and contiguous fold plans.

Windows are newest-first: row i of a windowed dataset is
(x_t, x_{t-1}, ..., x_{t-L+1}) with t = L - 1 + i, and its target is
z_{t + horizon}. Only full windows are produced; the series head is never
zero-padded.
"""
from typing import Optional, Tuple
import logging

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..config.constants import (
    DEFAULT_FOLDS,
    DEFAULT_TEST_LEN,
    ERROR_LENGTH_MISMATCH,
    ERROR_SERIES_TOO_SHORT,
)
from ..exceptions import InsufficientDataError, InvalidInputError
from ..featuremap.models import WindowedDataset
from .models import FoldPlan

logger = logging.getLogger(__name__)


def embed_windows(series_x, series_z, lags: int, horizon: int = 0) -> WindowedDataset:
    """
    Cut every full window of ``series_x`` and align its target in ``series_z``.

    Args:
        series_x: Input series
        series_z: Desired series, same length as the input
        lags: Window length L
        horizon: Steps between the newest window sample and its target

    Returns:
        WindowedDataset with N' = N - L + 1 - horizon rows
    """
    x = np.asarray(series_x, dtype=float)
    z = np.asarray(series_z, dtype=float)
    if x.ndim != 1 or z.ndim != 1:
        raise InvalidInputError("series must be one-dimensional")
    if x.size != z.size:
        raise InvalidInputError(ERROR_LENGTH_MISMATCH.format(expected=x.size, actual=z.size))
    if lags < 1:
        raise InvalidInputError(f"lags must be at least 1, got {lags}")
    if horizon < 0:
        raise InvalidInputError(f"horizon must be non-negative, got {horizon}")

    count = x.size - lags + 1 - horizon
    if count < 1:
        raise InsufficientDataError(ERROR_SERIES_TOO_SHORT.format(n=x.size, lags=lags, horizon=horizon))

    windows = sliding_window_view(x, lags)[:count, ::-1].copy()
    start = lags - 1 + horizon
    targets = z[start:start + count].copy()
    return WindowedDataset(windows=windows, targets=targets, horizon=horizon, first_time=lags - 1)


def kfold_splits(
    n_samples: int,
    folds: int = DEFAULT_FOLDS,
    test_len: int = DEFAULT_TEST_LEN,
    train_len: Optional[int] = None,
) -> FoldPlan:
    """
    Contiguous test blocks at the end of the series, each preceded by its training slice.

    Fold k tests on the k-th of ``folds`` consecutive blocks of ``test_len``
    samples. Its training slice is the ``train_len`` samples right before the
    test block, or everything before it when ``train_len`` is None.

    Raises:
        InsufficientDataError: The series cannot hold the test blocks plus a
            training slice for the first fold
    """
    if folds < 1 or test_len < 1:
        raise InvalidInputError(f"folds and test_len must be positive, got {folds}, {test_len}")
    if train_len is not None and train_len < 1:
        raise InvalidInputError(f"train_len must be positive, got {train_len}")

    required = folds * test_len + (train_len or 1)
    if n_samples < required:
        raise InsufficientDataError(
            f"{n_samples} samples cannot hold {folds} test blocks of {test_len} "
            f"plus a training slice of {train_len or 1}"
        )

    first_test = n_samples - folds * test_len
    plan = []
    for k in range(folds):
        test_start = first_test + k * test_len
        train_start = 0 if train_len is None else test_start - train_len
        plan.append(((train_start, test_start), (test_start, test_start + test_len)))
    return FoldPlan(folds=plan, test_len=test_len)


def fold_datasets(
    series_x,
    series_z,
    plan: FoldPlan,
    fold: int,
    lags: int,
    horizon: int = 0,
) -> Tuple[WindowedDataset, WindowedDataset]:
    """
    Training and test datasets of one fold.

    Training windows and their targets lie inside the training range. Test
    targets are exactly the samples of the test range; their windows may reach
    back before it.
    """
    (train_start, train_stop), (test_start, test_stop) = plan.folds[fold]
    x = np.asarray(series_x, dtype=float)
    z = np.asarray(series_z, dtype=float)

    train = embed_windows(x[train_start:train_stop], z[train_start:train_stop], lags, horizon)

    head = test_start - horizon - (lags - 1)
    if head < 0:
        raise InsufficientDataError(
            f"test block at {test_start} needs {horizon + lags - 1} samples of history"
        )
    test = embed_windows(x[head:test_stop], z[head:test_stop], lags, horizon)
    return train, test
