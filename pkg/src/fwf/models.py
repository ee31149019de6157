"""
Data models for fitted Functional Wiener Filters and their extracted modes
"""
from dataclasses import dataclass, field
from typing import Tuple
import logging

import numpy as np
import pandas as pd

from ..exceptions import InvalidInputError
from ..featuremap.models import FeatureMapSpec

logger = logging.getLogger(__name__)


def _read_only(values) -> np.ndarray:
    values = np.array(values, dtype=float, copy=True)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class FwfModel:
    """
    A fitted filter: w* = U^+ rho for the cutoff recorded at fit time.

    ``weights`` and ``rho`` are lag-major D*L vectors, entry tau*D + d.
    ``support`` is the 5th/95th percentile of the training inputs; modes are
    only trusted inside it.
    """

    spec: FeatureMapSpec
    lags: int
    weights: np.ndarray
    rho: np.ndarray
    pinv_cutoff: float
    theoretical_mmse: float
    desired_power: float
    horizon: int = 0
    effective_rank: int = 0
    eigenvalues: np.ndarray = field(default_factory=lambda: np.zeros(0))
    support: Tuple[float, float] = (0.0, 0.0)
    ridge: float = 0.0
    sample_count: int = 0
    warnings: Tuple[str, ...] = ()

    def __post_init__(self):
        size = self.spec.dims * self.lags
        for name in ("weights", "rho"):
            values = _read_only(getattr(self, name))
            if values.shape != (size,):
                raise InvalidInputError(f"{name} must have shape ({size},), got {values.shape}")
            object.__setattr__(self, name, values)
        object.__setattr__(self, "eigenvalues", _read_only(self.eigenvalues))
        object.__setattr__(self, "support", (float(self.support[0]), float(self.support[1])))
        object.__setattr__(self, "warnings", tuple(self.warnings))

    @property
    def dims(self) -> int:
        return self.spec.dims

    @property
    def sigma(self) -> float:
        return self.spec.sigma

    @property
    def size(self) -> int:
        """D*L, the dimension of H_RB."""
        return self.spec.dims * self.lags

    @property
    def is_full_rank(self) -> bool:
        return self.effective_rank == self.size

    def weight_tensor(self) -> np.ndarray:
        """w* folded to L x D: row tau holds the coefficients of mode f_tau."""
        return self.weights.reshape(self.lags, self.spec.dims)


@dataclass(frozen=True, eq=False)
class ModeSet:
    """
    Per-lag functions f_tau(x) = sum_d w*[tau*D + d] phi_d(x) sampled on a grid.
    """

    grid: np.ndarray
    functions: np.ndarray
    flatness: np.ndarray
    support: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        for name in ("grid", "functions", "flatness"):
            object.__setattr__(self, name, _read_only(getattr(self, name)))
        if self.functions.shape != (self.flatness.size, self.grid.size):
            raise InvalidInputError(
                f"functions must be L x G = {self.flatness.size} x {self.grid.size}, got {self.functions.shape}"
            )

    @property
    def lags(self) -> int:
        return self.functions.shape[0]

    def memory_depth(self, threshold: float = 0.05) -> int:
        """
        Number of lags up to the last one whose flatness exceeds ``threshold``
        times the largest flatness score.
        """
        peak = float(np.max(self.flatness)) if self.flatness.size else 0.0
        if peak == 0.0:
            return 0
        active = np.nonzero(self.flatness > threshold * peak)[0]
        return int(active[-1]) + 1

    def to_frame(self) -> pd.DataFrame:
        """Tidy table with columns tau, x, f_tau_x (lag-major rows)."""
        lags, points = self.functions.shape
        return pd.DataFrame({
            "tau": np.repeat(np.arange(lags), points),
            "x": np.tile(self.grid, lags),
            "f_tau_x": self.functions.ravel(),
        })
