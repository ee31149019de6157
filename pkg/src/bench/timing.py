"""
Per-sample evaluation latency.

Only the predict call is timed: the implementation is resolved once, warmed
up, and each repeat times one pass over the evaluation windows.
"""
from dataclasses import dataclass
from time import perf_counter_ns
from typing import Optional
import logging

import numpy as np

from ..config.constants import DEFAULT_TIMING_WARMUP, MIN_TIMING_REPEATS
from ..exceptions import InvalidInputError
from ..featuremap.models import WindowedDataset
from ..fwf import FwfModel
from .methods import predict_window

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TimingStats:
    """Median and interquartile range of per-sample latency, in nanoseconds."""

    median_ns: float
    iqr_ns: float
    repeats: int
    samples_per_repeat: int
    feature_dimension: Optional[int] = None


def timing_probe(
    model,
    eval_set,
    repeats: int = MIN_TIMING_REPEATS,
    warmup: int = DEFAULT_TIMING_WARMUP,
) -> TimingStats:
    """
    Measure per-sample predict latency of a fitted model.

    Args:
        model: Any fitted model the bench knows how to evaluate
        eval_set: N x L windows or a WindowedDataset
        repeats: Timed passes over the set (at least 30)
        warmup: Discarded predictions before timing

    Returns:
        TimingStats; ``feature_dimension`` is D*L for FWF models
    """
    if repeats < MIN_TIMING_REPEATS:
        raise InvalidInputError(f"repeats must be at least {MIN_TIMING_REPEATS}, got {repeats}")
    windows = eval_set.windows if isinstance(eval_set, WindowedDataset) else np.asarray(eval_set, dtype=float)
    if windows.ndim != 2 or windows.shape[0] == 0:
        raise InvalidInputError("timing needs a non-empty N x L evaluation set")

    predict = predict_window.dispatch(type(model))
    rows = list(windows)
    for i in range(warmup):
        predict(model, rows[i % len(rows)])

    per_sample = np.empty(repeats)
    for r in range(repeats):
        started = perf_counter_ns()
        for window in rows:
            predict(model, window)
        per_sample[r] = (perf_counter_ns() - started) / len(rows)

    q1, median, q3 = np.percentile(per_sample, [25.0, 50.0, 75.0])
    dimension = model.size if isinstance(model, FwfModel) else None
    logger.info(
        f"Timing {type(model).__name__}: median {median:.0f} ns/sample, IQR {q3 - q1:.0f} ns "
        f"over {repeats} x {len(rows)} predictions"
    )
    return TimingStats(
        median_ns=float(median),
        iqr_ns=float(q3 - q1),
        repeats=repeats,
        samples_per_repeat=len(rows),
        feature_dimension=dimension,
    )
