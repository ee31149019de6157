"""
Eigen-based pseudo-inverse of PSD matrices.

The pseudo-inverse keeps the eigenvectors of the input and reciprocates the
eigenvalues above a relative cutoff, so it is PSD whenever the input is.
"""
from typing import Optional
import logging

import numpy as np
from scipy import linalg

from ..config.constants import DEFAULT_PINV_EPSILON, ERROR_PSD_VIOLATION, PSD_TOLERANCE
from ..exceptions import InvalidInputError, PsdViolationError
from .models import MomentCorrentropy, SpectralPseudoInverse

logger = logging.getLogger(__name__)


def _validate(epsilon: float, ridge: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise InvalidInputError(f"epsilon must lie in (0, 1), got {epsilon}")
    if ridge < 0.0:
        raise InvalidInputError(f"ridge must be non-negative, got {ridge}")


def pinv_from_eigensystem(
    eigenvalues: np.ndarray,
    eigenvectors: np.ndarray,
    epsilon: float = DEFAULT_PINV_EPSILON,
    ridge: float = 0.0,
) -> SpectralPseudoInverse:
    """
    Build U^+ from an ascending eigendecomposition.

    Raises:
        PsdViolationError: lambda_min < -1e-8 * lambda_max
    """
    _validate(epsilon, ridge)
    lam_max = float(eigenvalues[-1]) if eigenvalues.size else 0.0
    lam_min = float(eigenvalues[0]) if eigenvalues.size else 0.0
    if lam_min < -PSD_TOLERANCE * max(lam_max, 0.0):
        raise PsdViolationError(ERROR_PSD_VIOLATION.format(lam_min=lam_min, lam_max=lam_max))

    clamped = np.where(eigenvalues < 0.0, 0.0, eigenvalues)
    if ridge > 0.0:
        retained = np.ones(clamped.shape, dtype=bool)
        reciprocals = 1.0 / (clamped + ridge)
    else:
        threshold = epsilon * lam_max
        retained = clamped > threshold if lam_max > 0.0 else np.zeros(clamped.shape, dtype=bool)
        reciprocals = np.zeros_like(clamped)
        reciprocals[retained] = 1.0 / clamped[retained]

    kept = eigenvectors[:, retained]
    matrix = (kept * reciprocals[retained]) @ kept.T
    matrix = 0.5 * (matrix + matrix.T)

    rank = int(np.count_nonzero(retained))
    if rank < clamped.size:
        logger.debug(f"Pseudo-inverse dropped {clamped.size - rank} of {clamped.size} eigen-directions")
    return SpectralPseudoInverse(
        matrix=matrix,
        cutoff=epsilon,
        effective_rank=rank,
        eigenvalues=clamped,
        eigenvectors=eigenvectors,
        retained=retained,
        ridge=ridge,
    )


def spectral_pinv(
    matrix: np.ndarray,
    epsilon: float = DEFAULT_PINV_EPSILON,
    ridge: float = 0.0,
) -> SpectralPseudoInverse:
    """Pseudo-inverse of any symmetric PSD matrix."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidInputError(f"matrix must be square, got shape {matrix.shape}")
    eigenvalues, eigenvectors = linalg.eigh(matrix)
    return pinv_from_eigensystem(eigenvalues, eigenvectors, epsilon, ridge)


def pseudo_inverse(
    u: MomentCorrentropy,
    epsilon: float = DEFAULT_PINV_EPSILON,
    ridge: Optional[float] = None,
) -> SpectralPseudoInverse:
    """
    U_M^+ by eigendecomposition, reusing the eigensystem cached on ``u``.

    Args:
        u: Moment-wise correntropy
        epsilon: Relative eigenvalue cutoff
        ridge: Optional shift (U_M + ridge I) used instead of truncation
    """
    eigenvalues, eigenvectors = u.eigensystem
    return pinv_from_eigensystem(eigenvalues, eigenvectors, epsilon, ridge or 0.0)
