"""
Kernels and reductions built on U_M: the data-dependent kernel K_U and the
block-trace estimate of the correntropy function V(t, s).
"""
import logging

import numpy as np

from ..config.constants import ERROR_LENGTH_MISMATCH
from ..exceptions import InvalidInputError
from ..featuremap.mapping import gaussian_kernel, map_window, map_windows
from ..featuremap.models import FeatureMapSpec
from .models import MomentCorrentropy

logger = logging.getLogger(__name__)


def _check_compatible(u: MomentCorrentropy, spec: FeatureMapSpec) -> None:
    if spec.dims != u.dims:
        raise InvalidInputError(f"feature map has D={spec.dims} but U_M was built with D={u.dims}")


def ku_kernel(x, y, u: MomentCorrentropy, spec: FeatureMapSpec) -> float:
    """K_U(x, y) = phi(x)^T U_M phi(y) for two newest-first windows."""
    _check_compatible(u, spec)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for window in (x, y):
        if window.shape != (u.lags,):
            raise InvalidInputError(ERROR_LENGTH_MISMATCH.format(expected=u.lags, actual=window.size))
    phi_x = map_window(x, spec).vector_view
    phi_y = map_window(y, spec).vector_view
    return float(phi_x @ u.matrix @ phi_y)


def ku_gram(windows, u: MomentCorrentropy, spec: FeatureMapSpec) -> np.ndarray:
    """Gram matrix of K_U over a set of windows (rows)."""
    _check_compatible(u, spec)
    windows = np.asarray(windows, dtype=float)
    if windows.ndim != 2 or windows.shape[1] != u.lags:
        raise InvalidInputError(ERROR_LENGTH_MISMATCH.format(expected=u.lags, actual=windows.shape[-1]))
    features = map_windows(windows, spec)
    gram = features @ u.matrix @ features.T
    return 0.5 * (gram + gram.T)


def correntropy_block_trace(u: MomentCorrentropy, t: int, s: int) -> float:
    """
    sum_d U_{d,t,d,s}: estimate of V(t, s) = E[G_sigma(X_t, X_s)].

    Converges to the direct Gaussian estimate as D grows (uncentered U only).
    """
    for name, value in (("t", t), ("s", s)):
        if not 0 <= value < u.lags:
            raise InvalidInputError(f"lag {name}={value} out of range [0, {u.lags})")
    block = u.matrix[t * u.dims:(t + 1) * u.dims, s * u.dims:(s + 1) * u.dims]
    return float(np.trace(block))


def correntropy_matrix(u: MomentCorrentropy) -> np.ndarray:
    """L x L matrix of block traces."""
    blocks = u.matrix.reshape(u.lags, u.dims, u.lags, u.dims)
    return np.einsum("tdsd->ts", blocks)


def direct_correntropy(windows, t: int, s: int, sigma: float) -> float:
    """(1/N') sum_i G_sigma(x_i(t), x_i(s)) evaluated with the untruncated kernel."""
    windows = np.asarray(windows, dtype=float)
    if windows.ndim != 2 or windows.shape[0] == 0:
        raise InvalidInputError(f"windows must be a non-empty N x L array, got shape {windows.shape}")
    return float(np.mean(gaussian_kernel(windows[:, t], windows[:, s], sigma)))
