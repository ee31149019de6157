"""
Explicit finite-rank approximation of the Gaussian RKHS.

Scalars map to phi_d(x) = e^{-x^2/(2 sigma^2)} x^d / (sigma^d sqrt(d!)) for
d = 0..D-1, computed by the recurrence phi_d = phi_{d-1} * x / (sigma sqrt(d))
so no factorial is ever formed. Inputs far enough out that the Gaussian factor
underflows map to the zero vector (the saturation region).
"""
from dataclasses import replace
from itertools import product
from math import factorial, sqrt
from typing import List, Tuple
import logging

import numpy as np
from scipy.special import gammainc

from ..config.constants import ERROR_CAPACITY, ERROR_EMPTY_WINDOW, ERROR_NON_FINITE, MULTIVARIATE_CAPACITY
from ..exceptions import CapacityError, InvalidInputError
from .models import FeatureMapSpec, WindowEmbedding, WindowedDataset

logger = logging.getLogger(__name__)


def _require_finite(values: np.ndarray) -> None:
    if not np.all(np.isfinite(values)):
        raise InvalidInputError(ERROR_NON_FINITE)


def map_samples(x, spec: FeatureMapSpec) -> np.ndarray:
    """
    Map every sample of an array into R^D.

    Args:
        x: Array of any shape
        spec: Feature map specification

    Returns:
        Array of shape x.shape + (D,)
    """
    x = np.asarray(x, dtype=float)
    _require_finite(x)

    out = np.empty(x.shape + (spec.dims,), dtype=float)
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        out[..., 0] = np.exp(-(x ** 2) * spec.gamma)
        ratio = x / spec.sigma
        for d in range(1, spec.dims):
            out[..., d] = out[..., d - 1] * (ratio / sqrt(d))

    saturated = (out[..., 0] == 0.0)
    if np.any(saturated):
        out[saturated] = 0.0
        logger.debug(f"{int(np.count_nonzero(saturated))} samples fell in the saturation region")
    return out


def map_scalar(x: float, spec: FeatureMapSpec) -> np.ndarray:
    """
    Map one scalar to (phi_0(x), ..., phi_{D-1}(x)).

    Its squared norm equals truncated_kernel(x, x, spec).
    """
    if np.ndim(x) != 0:
        raise InvalidInputError(f"map_scalar expects a scalar, got shape {np.shape(x)}")
    return map_samples(np.asarray([x], dtype=float), spec)[0]


def truncated_kernel(x: float, y: float, spec: FeatureMapSpec) -> float:
    """
    Finite-rank kernel B(x, y) = e^{-(x^2+y^2)/(2 sigma^2)} sum_{d<D} (xy/sigma^2)^d / d!.

    Every partial term is bounded by one, so the running product never overflows.
    """
    _require_finite(np.asarray([x, y], dtype=float))
    a = x * y / spec.sigma ** 2
    with np.errstate(under="ignore"):
        term = float(np.exp(-(x * x + y * y) * spec.gamma))
    if term == 0.0:
        return 0.0
    total = term
    for d in range(1, spec.dims):
        term *= a / d
        total += term
    return total


def gaussian_kernel(x, y, sigma: float):
    """Untruncated Gaussian kernel exp(-(x-y)^2 / (2 sigma^2)), elementwise."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.exp(-((x - y) ** 2) / (2.0 * sigma ** 2))


def truncation_tail_bound(x: float, y: float, spec: FeatureMapSpec) -> float:
    """
    Bound on |B(x, y) - G(x, y)|.

    e^{-(x^2+y^2)/(2 sigma^2)} * sum_{d>=D} |xy/sigma^2|^d / d!, where the tail
    sum equals e^{a} P(D, a) with P the regularized lower incomplete gamma.
    """
    a = abs(x * y) / spec.sigma ** 2
    if a == 0.0:
        return 0.0
    return float(np.exp(a - (x * x + y * y) * spec.gamma) * gammainc(spec.dims, a))


def map_window(window, spec: FeatureMapSpec) -> WindowEmbedding:
    """
    Map a newest-first window (window[tau] = X(t - tau)) into a D x L tensor.
    """
    window = np.asarray(window, dtype=float)
    if window.ndim != 1:
        raise InvalidInputError(f"window must be one-dimensional, got shape {window.shape}")
    if window.size == 0:
        raise InvalidInputError(ERROR_EMPTY_WINDOW)
    return WindowEmbedding(tensor=map_samples(window, spec).T.copy())


def map_windows(windows, spec: FeatureMapSpec) -> np.ndarray:
    """
    Vector views of many windows at once.

    Args:
        windows: N' x L array, rows newest-first

    Returns:
        N' x (D*L) array, entry [i, tau*D + d] = phi_d(windows[i, tau])
    """
    windows = np.asarray(windows, dtype=float)
    if windows.ndim != 2 or windows.shape[1] == 0:
        raise InvalidInputError(f"windows must be an N x L array with L >= 1, got shape {windows.shape}")
    mapped = map_samples(windows, spec)
    return mapped.reshape(windows.shape[0], windows.shape[1] * spec.dims)


def embed_dataset(dataset: WindowedDataset, spec: FeatureMapSpec) -> WindowedDataset:
    """Return a copy of the dataset with its feature matrix populated."""
    features = map_windows(dataset.windows, spec)
    logger.debug(
        f"Embedded {dataset.sample_count} windows into {features.shape[1]} dimensions "
        f"(sigma={spec.sigma}, D={spec.dims})"
    )
    return replace(dataset, features=features, spec=spec)


def multivariate_size(p: int, max_degree: int) -> int:
    """Number of coordinates sum_{d=0..k} p^d of the vector-input map."""
    return sum(p ** d for d in range(max_degree + 1))


def multivariate_index_tuples(p: int, degree: int) -> List[Tuple[int, ...]]:
    """All selections of ``degree`` coordinates (1-based), in lexicographic order."""
    return list(product(range(1, p + 1), repeat=degree))


def map_multivariate(x, sigma: float, max_degree: int) -> np.ndarray:
    """
    Taylor feature map of the Gaussian kernel for vector inputs.

    Coordinates for degree d enumerate every d-tuple of input indices in
    lexicographic order. Meant for validating the scalar fast path.

    Raises:
        CapacityError: if sum_d p^d exceeds the enumeration guard
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise InvalidInputError(f"x must be a non-empty vector, got shape {x.shape}")
    _require_finite(x)
    if sigma <= 0:
        raise InvalidInputError(f"sigma must be positive, got {sigma}")
    if max_degree < 0:
        raise InvalidInputError(f"max_degree must be non-negative, got {max_degree}")

    size = multivariate_size(x.size, max_degree)
    if size > MULTIVARIATE_CAPACITY:
        raise CapacityError(ERROR_CAPACITY.format(size=size, limit=MULTIVARIATE_CAPACITY))

    envelope = np.exp(-np.dot(x, x) / (2.0 * sigma ** 2))
    blocks = []
    monomials = np.ones(1)
    for d in range(max_degree + 1):
        if d > 0:
            monomials = np.multiply.outer(monomials, x).ravel()
        blocks.append(monomials * (envelope / (sigma ** d * sqrt(factorial(d)))))
    return np.concatenate(blocks)


def truncated_kernel_multivariate(x, y, sigma: float, max_degree: int) -> float:
    """Closed form e^{-(|x|^2+|y|^2)/(2 sigma^2)} sum_{d<=k} (x.y)^d / (sigma^{2d} d!)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = float(np.dot(x, y)) / sigma ** 2
    series = sum(a ** d / factorial(d) for d in range(max_degree + 1))
    return float(np.exp(-(np.dot(x, x) + np.dot(y, y)) / (2.0 * sigma ** 2)) * series)
