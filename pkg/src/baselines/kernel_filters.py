"""
Kernel adaptive filters and kernel ridge regression.

All of them predict with a Gaussian expansion over stored centers, so their
evaluation cost grows with the dictionary. KLMS and KRLS are sequential
recursions over the training windows; KRR (and its GPR label) is a batch
Cholesky solve.
"""
from typing import Optional
import logging

import numpy as np
from joblib import Parallel, delayed
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.spatial.distance import cdist

from ..config.constants import DEFAULT_HORIZON, ERROR_CONDITIONING, ERROR_LENGTH_MISMATCH, MethodName
from ..datagen.windowing import embed_windows
from ..exceptions import ConditioningError, InvalidInputError
from ..featuremap.models import WindowedDataset
from .models import DictionaryModel

logger = logging.getLogger(__name__)

_CONDITIONING_FLOOR = 1e-12


def gaussian_gram(a, b, sigma: float, n_jobs: int = 1) -> np.ndarray:
    """
    G_sigma between the rows of ``a`` and ``b``.

    With n_jobs != 1 the rows of ``a`` are split across joblib workers.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    scale = 2.0 * sigma ** 2
    if n_jobs == 1 or a.shape[0] < 2:
        return np.exp(-cdist(a, b, "sqeuclidean") / scale)
    blocks = np.array_split(a, min(a.shape[0], 8 * max(n_jobs, 1)))
    parts = Parallel(n_jobs=n_jobs)(delayed(cdist)(block, b, "sqeuclidean") for block in blocks)
    return np.exp(-np.vstack(parts) / scale)


def _check_sigma(sigma: float) -> None:
    if not np.isfinite(sigma) or sigma <= 0:
        raise InvalidInputError(f"sigma must be positive, got {sigma}")


def _kernel_row(centers: np.ndarray, x: np.ndarray, gamma: float) -> np.ndarray:
    diff = centers - x
    return np.exp(-np.einsum("ij,ij->i", diff, diff) * gamma)


# ============================================================================
# KLMS
# ============================================================================

def klms_fit_dataset(dataset: WindowedDataset, sigma: float, step_size: float) -> DictionaryModel:
    """
    Kernel least mean squares over the windows in order.

    Each window joins the dictionary with coefficient step_size * e, where e
    is the error of the prediction made before the update.
    """
    _check_sigma(sigma)
    if step_size < 0:
        raise InvalidInputError(f"step_size must be non-negative, got {step_size}")

    windows = dataset.windows
    targets = dataset.targets
    count = dataset.sample_count
    gamma = 1.0 / (2.0 * sigma ** 2)
    coefficients = np.zeros(count)
    curve = np.zeros(count)
    for i in range(count):
        prior = coefficients[:i] @ _kernel_row(windows[:i], windows[i], gamma) if i else 0.0
        error = targets[i] - prior
        coefficients[i] = step_size * error
        curve[i] = error ** 2

    logger.info(f"KLMS fit: N'={count}, sigma={sigma}, step={step_size}, final MSE(100)={curve[-100:].mean():.4e}")
    return DictionaryModel(
        variant=MethodName.KLMS,
        centers=windows,
        coefficients=coefficients,
        sigma=sigma,
        horizon=dataset.horizon,
        step_size=step_size,
        learning_curve=curve,
    )


def klms_fit(
    series_x,
    series_z,
    lags: int,
    horizon: int = DEFAULT_HORIZON,
    sigma: float = 1.0,
    step_size: float = 0.5,
) -> DictionaryModel:
    """KLMS on the windows of a pair of series."""
    return klms_fit_dataset(embed_windows(series_x, series_z, lags, horizon), sigma, step_size)


# ============================================================================
# KRLS
# ============================================================================

def krls_fit_dataset(dataset: WindowedDataset, sigma: float, ridge: float) -> DictionaryModel:
    """
    Exact kernel recursive least squares with regularization.

    Keeps Q = (K + ridge I)^{-1} up to date with the block-inverse update, so
    after all windows the coefficients equal Q z over the dictionary. A window
    whose Schur complement r falls to the conditioning floor (an exact repeat
    with ridge 0) is already spanned and does not join the dictionary.
    """
    _check_sigma(sigma)
    if ridge < 0:
        raise InvalidInputError(f"ridge must be non-negative, got {ridge}")

    windows = dataset.windows
    targets = dataset.targets
    count = dataset.sample_count
    gamma = 1.0 / (2.0 * sigma ** 2)

    centers = np.empty_like(windows)
    inverse = np.zeros((count, count))
    coefficients = np.zeros(count)
    size = 0
    for n in range(count):
        x = windows[n]
        if size == 0:
            r = ridge + 1.0
            h = np.zeros(0)
            q = np.zeros(0)
        else:
            h = _kernel_row(centers[:size], x, gamma)
            q = inverse[:size, :size] @ h
            r = ridge + 1.0 - h @ q
        if r <= _CONDITIONING_FLOOR:
            continue

        error = targets[n] - h @ coefficients[:size]
        if size:
            inverse[:size, :size] += np.outer(q, q) / r
            inverse[:size, size] = -q / r
            inverse[size, :size] = -q / r
            coefficients[:size] -= q * (error / r)
        inverse[size, size] = 1.0 / r
        coefficients[size] = error / r
        centers[size] = x
        size += 1

    if size < count:
        logger.warning(f"KRLS: {count - size} of {count} windows already spanned by the dictionary, skipped")
    logger.info(f"KRLS fit: N'={count}, dictionary={size}, sigma={sigma}, ridge={ridge}")
    return DictionaryModel(
        variant=MethodName.KRLS,
        centers=centers[:size].copy(),
        coefficients=coefficients[:size].copy(),
        sigma=sigma,
        horizon=dataset.horizon,
        ridge=ridge,
        inverse_gram=inverse[:size, :size].copy(),
    )


def krls_fit(
    series_x,
    series_z,
    lags: int,
    horizon: int = DEFAULT_HORIZON,
    sigma: float = 1.0,
    ridge: float = 1e-3,
) -> DictionaryModel:
    """KRLS on the windows of a pair of series."""
    return krls_fit_dataset(embed_windows(series_x, series_z, lags, horizon), sigma, ridge)


# ============================================================================
# KRR / GPR
# ============================================================================

def _ridge_solve(
    windows,
    targets,
    sigma: float,
    lam: float,
    variant: MethodName,
    horizon: int,
    n_jobs: int,
) -> DictionaryModel:
    _check_sigma(sigma)
    if not lam > 0:
        raise InvalidInputError(f"lambda must be positive, got {lam}")
    windows = np.asarray(windows, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if windows.ndim != 2:
        raise InvalidInputError(f"windows must be an N x L array, got shape {windows.shape}")
    if targets.shape != (windows.shape[0],):
        raise InvalidInputError(ERROR_LENGTH_MISMATCH.format(expected=windows.shape[0], actual=targets.size))

    gram = gaussian_gram(windows, windows, sigma, n_jobs)
    gram[np.diag_indices_from(gram)] += lam
    suggested = 10.0 * lam
    try:
        factor = cho_factor(gram, lower=True)
        coefficients = cho_solve(factor, targets)
    except LinAlgError:
        raise ConditioningError(ERROR_CONDITIONING.format(lam=lam, suggested=suggested), suggested)
    if not np.all(np.isfinite(coefficients)):
        raise ConditioningError(ERROR_CONDITIONING.format(lam=lam, suggested=suggested), suggested)

    logger.info(f"{variant.value.upper()} fit: N={windows.shape[0]}, sigma={sigma}, lambda={lam}")
    return DictionaryModel(
        variant=variant,
        centers=windows,
        coefficients=coefficients,
        sigma=sigma,
        horizon=horizon,
        ridge=lam,
    )


def krr_fit(windows, targets, sigma: float, lam: float, horizon: int = 0, n_jobs: int = 1) -> DictionaryModel:
    """
    Kernel ridge regression alpha = (K + lam I)^{-1} z.

    Raises:
        ConditioningError: Cholesky of K + lam I failed; carries a larger lambda
    """
    return _ridge_solve(windows, targets, sigma, lam, MethodName.KRR, horizon, n_jobs)


def gpr_fit(
    windows,
    targets,
    sigma: float,
    noise_variance: float,
    horizon: int = 0,
    n_jobs: int = 1,
) -> DictionaryModel:
    """Gaussian process posterior mean: KRR with lambda read as the noise variance."""
    return _ridge_solve(windows, targets, sigma, noise_variance, MethodName.GPR, horizon, n_jobs)


# ============================================================================
# PREDICTION
# ============================================================================

def dictionary_predict_batch(model: DictionaryModel, windows) -> np.ndarray:
    """sum_j alpha_j G_sigma(x, c_j) for every row of ``windows``."""
    windows = np.asarray(windows, dtype=float)
    if windows.ndim != 2 or windows.shape[1] != model.lags:
        raise InvalidInputError(ERROR_LENGTH_MISMATCH.format(expected=model.lags, actual=windows.shape[-1]))
    if model.dictionary_size == 0:
        return np.zeros(windows.shape[0])
    return gaussian_gram(windows, model.centers, model.sigma) @ model.coefficients


def dictionary_predict(model: DictionaryModel, window) -> float:
    window = np.asarray(window, dtype=float)
    if window.shape != (model.lags,):
        raise InvalidInputError(ERROR_LENGTH_MISMATCH.format(expected=model.lags, actual=window.size))
    gamma = 1.0 / (2.0 * model.sigma ** 2)
    return float(_kernel_row(model.centers, window, gamma) @ model.coefficients)


def training_mse(model: DictionaryModel, dataset: Optional[WindowedDataset] = None) -> float:
    """MSE on a dataset; for KLMS without one, the mean prior squared error."""
    if dataset is None:
        if model.learning_curve.size == 0:
            raise InvalidInputError("no dataset given and the model has no learning curve")
        return float(np.mean(model.learning_curve))
    residual = dataset.targets - dictionary_predict_batch(model, dataset.windows)
    return float(np.mean(residual ** 2))
