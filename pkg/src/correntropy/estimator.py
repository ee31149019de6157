"""
Estimation of the moment-wise correntropy matrix U_M from embedded windows.

U_M is the raw second moment (1/N') sum_i phi(x_i) phi(x_i)^T of the window
embeddings. Partial sums are associative, so chunks can be accumulated in
parallel and merged.
"""
from typing import List, Optional
import logging

import numpy as np
from joblib import Parallel, delayed

from ..config.logging_config import LoggerMixin
from ..exceptions import InvalidInputError
from ..featuremap.models import WindowedDataset
from .models import MomentCorrentropy

logger = logging.getLogger(__name__)


class MomentAccumulator(LoggerMixin):
    """Running sums for U_M; merge() adds partial sums from other chunks."""

    def __init__(self, dims: int, lags: int, centered: bool = False):
        self.dims = dims
        self.lags = lags
        self.centered = centered
        size = dims * lags
        self.outer_sum = np.zeros((size, size))
        self.feature_sum = np.zeros(size)
        self.count = 0

    def update(self, features: np.ndarray) -> "MomentAccumulator":
        """Add a block of embedded windows (rows are vector views)."""
        features = np.asarray(features, dtype=float)
        if features.ndim != 2 or features.shape[1] != self.dims * self.lags:
            raise InvalidInputError(
                f"rows must have dimension D*L = {self.dims * self.lags}, got shape {features.shape}"
            )
        self.outer_sum += features.T @ features
        self.feature_sum += features.sum(axis=0)
        self.count += features.shape[0]
        return self

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        """Combine two accumulators over disjoint sample sets."""
        if (other.dims, other.lags, other.centered) != (self.dims, self.lags, self.centered):
            raise InvalidInputError("cannot merge accumulators with different D, L or centering")
        merged = MomentAccumulator(self.dims, self.lags, self.centered)
        merged.outer_sum = self.outer_sum + other.outer_sum
        merged.feature_sum = self.feature_sum + other.feature_sum
        merged.count = self.count + other.count
        return merged

    def finalize(self) -> MomentCorrentropy:
        """Average the partial sums into U_M."""
        if self.count < 1:
            raise InvalidInputError("U_M needs at least one window")
        matrix = self.outer_sum / self.count
        if self.centered:
            mean = self.feature_sum / self.count
            matrix = matrix - np.outer(mean, mean)
        # Exact symmetry regardless of summation order
        matrix = 0.5 * (matrix + matrix.T)
        self.logger.debug(f"U_M finalized from {self.count} windows ({matrix.shape[0]} dimensions)")
        return MomentCorrentropy(
            matrix=matrix,
            dims=self.dims,
            lags=self.lags,
            sample_count=self.count,
            centered=self.centered,
        )


def _accumulate(features: np.ndarray, dims: int, lags: int, centered: bool) -> MomentAccumulator:
    return MomentAccumulator(dims, lags, centered).update(features)


def _dataset_shape(embedded: WindowedDataset):
    if not embedded.is_embedded or embedded.spec is None:
        raise InvalidInputError("dataset must be embedded (see featuremap.embed_dataset) before estimating U")
    return embedded.spec.dims, embedded.lags


def estimate_u(
    embedded: WindowedDataset,
    centered: bool = False,
    chunk_size: Optional[int] = None,
    n_jobs: int = 1,
) -> MomentCorrentropy:
    """
    Estimate U_M as the average outer product of the window embeddings.

    Args:
        embedded: Dataset with its feature matrix populated
        centered: Subtract the feature mean before forming outer products
        chunk_size: Accumulate in row chunks of this size (None = one pass)
        n_jobs: joblib workers used when chunking

    Returns:
        MomentCorrentropy with sample_count = N'
    """
    dims, lags = _dataset_shape(embedded)
    features = embedded.features
    if features.shape[0] < 1:
        raise InvalidInputError("U_M needs at least one window")
    if features.shape[1] != dims * lags:
        raise InvalidInputError(
            f"rows must have dimension D*L = {dims * lags}, got {features.shape[1]}"
        )

    if chunk_size is None or chunk_size >= features.shape[0]:
        return MomentAccumulator(dims, lags, centered).update(features).finalize()

    chunks: List[np.ndarray] = [
        features[start:start + chunk_size] for start in range(0, features.shape[0], chunk_size)
    ]
    partials = Parallel(n_jobs=n_jobs)(
        delayed(_accumulate)(chunk, dims, lags, centered) for chunk in chunks
    )
    total = partials[0]
    for partial in partials[1:]:
        total = total.merge(partial)
    logger.debug(f"Merged {len(partials)} partial moment sums")
    return total.finalize()


def tensor_entry(u: MomentCorrentropy, d1: int, t: int, d2: int, s: int) -> float:
    """
    U_{d1,t,d2,s}, read from the unfolded matrix at [t*D + d1, s*D + d2].
    """
    for name, value, bound in (("d1", d1, u.dims), ("t", t, u.lags), ("d2", d2, u.dims), ("s", s, u.lags)):
        if not 0 <= value < bound:
            raise InvalidInputError(f"index {name}={value} out of range [0, {bound})")
    return float(u.matrix[t * u.dims + d1, s * u.dims + d2])
