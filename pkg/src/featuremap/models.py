"""
Data models for the explicit Gaussian feature map
"""
from dataclasses import dataclass
from typing import Optional
import logging

import numpy as np

from ..exceptions import InvalidInputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FeatureMapSpec:
    """
    Kernel size and number of retained degrees of the truncated Gaussian map.

    ``dims`` covers degrees 0..dims-1; degree 0 is the constant-like term
    e^{-x^2/(2 sigma^2)} that lets the map carry offsets.
    """

    sigma: float
    dims: int

    def __post_init__(self):
        if not np.isfinite(self.sigma) or self.sigma <= 0:
            raise InvalidInputError(f"sigma must be a positive finite number, got {self.sigma}")
        if int(self.dims) != self.dims or self.dims < 1:
            raise InvalidInputError(f"dims must be a positive integer, got {self.dims}")

    @property
    def gamma(self) -> float:
        """Precision 1/(2 sigma^2) used by the Gaussian factor."""
        return 1.0 / (2.0 * self.sigma ** 2)


@dataclass(frozen=True)
class WindowEmbedding:
    """
    A window mapped into H_RB.

    ``tensor`` is D x L: rows are degrees, columns are lags (newest first).
    The vector view stacks the columns, so vector[tau * D + d] == tensor[d, tau].
    """

    tensor: np.ndarray

    def __post_init__(self):
        if self.tensor.ndim != 2 or self.tensor.shape[1] == 0:
            raise InvalidInputError(f"tensor must be a non-empty D x L matrix, got shape {self.tensor.shape}")

    @property
    def dims(self) -> int:
        return self.tensor.shape[0]

    @property
    def lags(self) -> int:
        return self.tensor.shape[1]

    @property
    def vector_view(self) -> np.ndarray:
        """Lag-major unfolding of the tensor."""
        return self.tensor.ravel(order="F")

    @classmethod
    def from_vector(cls, vector: np.ndarray, dims: int) -> "WindowEmbedding":
        """Fold a D*L vector back into its D x L tensor."""
        vector = np.asarray(vector, dtype=float)
        if vector.ndim != 1 or vector.size % dims != 0:
            raise InvalidInputError(f"vector of size {vector.size} cannot be folded with dims={dims}")
        return cls(tensor=vector.reshape((dims, vector.size // dims), order="F"))

    def inner(self, other: "WindowEmbedding") -> float:
        """Inner product in H_RB as the double sum over degrees and lags."""
        if self.tensor.shape != other.tensor.shape:
            raise InvalidInputError(
                f"embedding shapes differ: {self.tensor.shape} vs {other.tensor.shape}"
            )
        return float(np.sum(self.tensor * other.tensor))


@dataclass(frozen=True)
class WindowedDataset:
    """
    Windows cut from a series with their aligned targets.

    Row i of ``windows`` is (x_t, x_{t-1}, ..., x_{t-L+1}) for t = first_time + i,
    and ``targets[i]`` is z_{t + horizon}. ``features`` holds the N' x D*L matrix
    of vector views once the dataset has been embedded.
    """

    windows: np.ndarray
    targets: np.ndarray
    horizon: int = 0
    first_time: int = 0
    features: Optional[np.ndarray] = None
    spec: Optional[FeatureMapSpec] = None

    def __post_init__(self):
        if self.windows.ndim != 2:
            raise InvalidInputError(f"windows must be a 2-D array, got shape {self.windows.shape}")
        if self.targets.shape != (self.windows.shape[0],):
            raise InvalidInputError(
                f"targets must have shape ({self.windows.shape[0]},), got {self.targets.shape}"
            )
        if self.features is not None and self.features.shape[0] != self.windows.shape[0]:
            raise InvalidInputError("features and windows disagree on the number of rows")

    @property
    def sample_count(self) -> int:
        """N', the number of windows."""
        return self.windows.shape[0]

    @property
    def lags(self) -> int:
        return self.windows.shape[1]

    @property
    def is_embedded(self) -> bool:
        return self.features is not None
