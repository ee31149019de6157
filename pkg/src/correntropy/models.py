"""
Data models for the moment-wise correntropy matrix and its pseudo-inverse
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Tuple
import logging

import numpy as np
from scipy import linalg

from ..config.constants import SYMMETRY_TOLERANCE
from ..exceptions import InvalidInputError

logger = logging.getLogger(__name__)


def _frozen_copy(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=float, copy=True)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class MomentCorrentropy:
    """
    Unfolded moment-wise correntropy U_M, a (D*L) x (D*L) symmetric PSD matrix.

    Entry [t*D + d1, s*D + d2] is the tensor entry U_{d1,t,d2,s}, the average of
    phi_{d1}(X(n-t)) * phi_{d2}(X(n-s)) over the training windows.
    """

    matrix: np.ndarray
    dims: int
    lags: int
    sample_count: int
    centered: bool = False

    def __post_init__(self):
        size = self.dims * self.lags
        if self.matrix.shape != (size, size):
            raise InvalidInputError(
                f"U_M must be {size} x {size} for D={self.dims}, L={self.lags}, got {self.matrix.shape}"
            )
        scale = float(np.max(np.abs(self.matrix))) if self.matrix.size else 0.0
        asymmetry = float(np.max(np.abs(self.matrix - self.matrix.T))) if self.matrix.size else 0.0
        if asymmetry > SYMMETRY_TOLERANCE * max(scale, np.finfo(float).tiny):
            raise InvalidInputError(f"U_M is not symmetric (max asymmetry {asymmetry:.3e})")
        object.__setattr__(self, "matrix", _frozen_copy(self.matrix))

    @property
    def size(self) -> int:
        return self.dims * self.lags

    @cached_property
    def eigensystem(self) -> Tuple[np.ndarray, np.ndarray]:
        """Ascending eigenvalues and orthonormal eigenvectors (columns)."""
        eigenvalues, eigenvectors = linalg.eigh(self.matrix)
        logger.debug(
            f"U_M spectrum: lambda_max={eigenvalues[-1]:.3e}, lambda_min={eigenvalues[0]:.3e}"
        )
        return _frozen_copy(eigenvalues), _frozen_copy(eigenvectors)

    def tensor_view(self) -> np.ndarray:
        """The four-index view U[d1, t, d2, s]."""
        return self.matrix.reshape(self.lags, self.dims, self.lags, self.dims).transpose(1, 0, 3, 2)


@dataclass(frozen=True, eq=False)
class SpectralPseudoInverse:
    """
    U^+ built from the eigendecomposition of a PSD matrix.

    Eigenvalues above ``cutoff * lambda_max`` are reciprocated, the rest dropped.
    With a positive ``ridge`` every eigenvalue is shifted instead and nothing is
    dropped.
    """

    matrix: np.ndarray
    cutoff: float
    effective_rank: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    retained: np.ndarray
    ridge: float = 0.0

    def __post_init__(self):
        for name in ("matrix", "eigenvalues", "eigenvectors", "retained"):
            object.__setattr__(self, name, np.array(getattr(self, name), copy=True))
            getattr(self, name).setflags(write=False)

    @property
    def is_full_rank(self) -> bool:
        return self.effective_rank == self.matrix.shape[0]

    @property
    def retained_vectors(self) -> np.ndarray:
        """Eigenvectors whose eigenvalues survived the cutoff (columns)."""
        return self.eigenvectors[:, self.retained]
