"""
Data models for the reference filters
"""
from dataclasses import dataclass, field
from typing import Optional
import logging

import numpy as np

from ..config.constants import MethodName
from ..exceptions import InvalidInputError

logger = logging.getLogger(__name__)


def _read_only(values) -> np.ndarray:
    values = np.array(values, dtype=float, copy=True)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class LinearWienerModel:
    """FIR Wiener filter on the raw window: weights = R^+ rho_z."""

    lags: int
    weights: np.ndarray
    autocorrelation: np.ndarray
    crosscorrelation: np.ndarray
    horizon: int = 0
    pinv_cutoff: float = 0.0
    effective_rank: int = 0

    def __post_init__(self):
        for name in ("weights", "autocorrelation", "crosscorrelation"):
            object.__setattr__(self, name, _read_only(getattr(self, name)))
        if self.weights.shape != (self.lags,) or self.crosscorrelation.shape != (self.lags,):
            raise InvalidInputError(f"weights and crosscorrelation must have shape ({self.lags},)")
        if self.autocorrelation.shape != (self.lags, self.lags):
            raise InvalidInputError(f"autocorrelation must be {self.lags} x {self.lags}")

    @property
    def variant(self) -> str:
        return MethodName.WIENER.value


@dataclass(frozen=True, eq=False)
class DictionaryModel:
    """
    Kernel expansion f(x) = sum_j alpha_j G_sigma(x, c_j) over stored centers.

    Shared by KLMS, KRLS, KRR and GPR; ``variant`` says which fit produced it.
    ``inverse_gram`` is the KRLS state (K + ridge I)^{-1}; ``learning_curve``
    holds the KLMS prior squared errors.
    """

    variant: str
    centers: np.ndarray
    coefficients: np.ndarray
    sigma: float
    horizon: int = 0
    step_size: Optional[float] = None
    ridge: Optional[float] = None
    inverse_gram: Optional[np.ndarray] = None
    learning_curve: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        object.__setattr__(self, "variant", MethodName(self.variant).value)
        centers = _read_only(self.centers)
        if centers.ndim != 2:
            raise InvalidInputError(f"centers must be an N x L array, got shape {centers.shape}")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "coefficients", _read_only(self.coefficients))
        if self.coefficients.shape != (centers.shape[0],):
            raise InvalidInputError("coefficients must align with centers")
        if not np.isfinite(self.sigma) or self.sigma <= 0:
            raise InvalidInputError(f"sigma must be positive, got {self.sigma}")
        if self.inverse_gram is not None:
            object.__setattr__(self, "inverse_gram", _read_only(self.inverse_gram))
        object.__setattr__(self, "learning_curve", _read_only(self.learning_curve))

    @property
    def lags(self) -> int:
        return self.centers.shape[1]

    @property
    def dictionary_size(self) -> int:
        return self.centers.shape[0]
