"""
The Functional Wiener Filter.

Fitting is closed form: embed the training windows, estimate U_M and rho,
and set w* = U_M^+ rho. Prediction is one inner product <phi(window), w*>,
so its cost depends on D*L only, never on the training size.
"""
from typing import List, Optional
import logging

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..config.constants import (
    DEFAULT_HORIZON,
    DEFAULT_PINV_EPSILON,
    ERROR_LENGTH_MISMATCH,
    FLATNESS_PERCENTILES,
    PSD_TOLERANCE,
)
from ..correntropy.estimator import estimate_u
from ..correntropy.models import MomentCorrentropy
from ..correntropy.spectral import pseudo_inverse
from ..datagen.windowing import embed_windows
from ..exceptions import InvalidInputError
from ..featuremap.mapping import embed_dataset, map_samples, map_windows
from ..featuremap.models import FeatureMapSpec, WindowedDataset
from .models import FwfModel, ModeSet

logger = logging.getLogger(__name__)


def estimate_rho(embedded: WindowedDataset, targets=None) -> np.ndarray:
    """
    Cross-correlation rho = (1/N') sum_i z_i phi(x_i).

    Args:
        embedded: Dataset with its feature matrix populated
        targets: Desired values aligned with the windows (defaults to the
            dataset's own targets)
    """
    if not embedded.is_embedded:
        raise InvalidInputError("dataset must be embedded before estimating rho")
    z = embedded.targets if targets is None else np.asarray(targets, dtype=float)
    if z.shape != (embedded.sample_count,):
        raise InvalidInputError(ERROR_LENGTH_MISMATCH.format(expected=embedded.sample_count, actual=z.size))
    return embedded.features.T @ z / embedded.sample_count


def _training_samples(dataset: WindowedDataset) -> np.ndarray:
    # Newest sample of every window plus the older samples of the first one
    return np.concatenate([dataset.windows[0, :0:-1], dataset.windows[:, 0]])


def fit_dataset(
    dataset: WindowedDataset,
    spec: FeatureMapSpec,
    epsilon: float = DEFAULT_PINV_EPSILON,
    ridge: float = 0.0,
    chunk_size: Optional[int] = None,
    n_jobs: int = 1,
) -> FwfModel:
    """
    Fit w* on an already windowed dataset.

    Rank deficiency and feature-map saturation are not failures: they are
    logged and carried on the returned model's ``warnings``.
    """
    embedded = dataset if dataset.is_embedded and dataset.spec == spec else embed_dataset(dataset, spec)
    u = estimate_u(embedded, chunk_size=chunk_size, n_jobs=n_jobs)
    pinv = pseudo_inverse(u, epsilon, ridge or None)
    rho = estimate_rho(embedded)
    weights = pinv.matrix @ rho

    z = embedded.targets
    desired_power = float(np.mean(z ** 2))
    mmse = desired_power - float(rho @ weights)

    warnings: List[str] = []
    if not pinv.is_full_rank:
        message = (
            f"U_M has effective rank {pinv.effective_rank} of {u.size} "
            f"at cutoff {epsilon:g}; w* is the minimum-norm solution"
        )
        logger.warning(message)
        warnings.append(message)
    samples = _training_samples(embedded)
    saturated = int(np.count_nonzero(embedded.features[:, 0] == 0.0))
    if saturated:
        message = f"{saturated} of {embedded.sample_count} newest samples saturate the feature map (sigma={spec.sigma})"
        logger.warning(message)
        warnings.append(message)
    if mmse < -PSD_TOLERANCE * max(desired_power, np.finfo(float).tiny):
        logger.warning(f"Theoretical MMSE is negative ({mmse:.3e}); U_M may be ill-conditioned")

    low, high = np.percentile(samples, FLATNESS_PERCENTILES)
    model = FwfModel(
        spec=spec,
        lags=embedded.lags,
        weights=weights,
        rho=rho,
        pinv_cutoff=epsilon,
        theoretical_mmse=mmse,
        desired_power=desired_power,
        horizon=embedded.horizon,
        effective_rank=pinv.effective_rank,
        eigenvalues=pinv.eigenvalues,
        support=(low, high),
        ridge=ridge,
        sample_count=embedded.sample_count,
        warnings=tuple(warnings),
    )
    logger.info(
        f"FWF fit: D={spec.dims}, L={model.lags}, sigma={spec.sigma}, N'={model.sample_count}, "
        f"rank={model.effective_rank}/{model.size}, theoretical MMSE={mmse:.6e}"
    )
    return model


def fit(
    series_x,
    series_z,
    lags: int,
    spec: FeatureMapSpec,
    epsilon: float = DEFAULT_PINV_EPSILON,
    horizon: int = DEFAULT_HORIZON,
    ridge: float = 0.0,
    chunk_size: Optional[int] = None,
    n_jobs: int = 1,
) -> FwfModel:
    """
    Fit the filter on a pair of series.

    Args:
        series_x: Input series
        series_z: Desired series (same length)
        lags: Window length L
        spec: Feature map (sigma, D)
        epsilon: Relative eigenvalue cutoff of the pseudo-inverse
        horizon: Window i predicts z at its newest time plus ``horizon``
        ridge: Optional shift of U_M used instead of truncation
        chunk_size: Accumulate U_M in chunks of this many windows
        n_jobs: joblib workers for chunked accumulation

    Returns:
        Immutable FwfModel
    """
    dataset = embed_windows(series_x, series_z, lags, horizon)
    return fit_dataset(dataset, spec, epsilon, ridge, chunk_size, n_jobs)


def predict(model: FwfModel, window) -> float:
    """<phi(window), w*> for one newest-first window."""
    window = np.asarray(window, dtype=float)
    if window.shape != (model.lags,):
        raise InvalidInputError(ERROR_LENGTH_MISMATCH.format(expected=model.lags, actual=window.size))
    # Row-major L x D flattening is the lag-major vector view
    return float(map_samples(window, model.spec).ravel() @ model.weights)


def predict_batch(model: FwfModel, windows) -> np.ndarray:
    """Predictions for an N x L array of newest-first windows."""
    windows = np.asarray(windows, dtype=float)
    if windows.ndim != 2 or windows.shape[1] != model.lags:
        raise InvalidInputError(ERROR_LENGTH_MISMATCH.format(expected=model.lags, actual=windows.shape[-1]))
    return map_windows(windows, model.spec) @ model.weights


def predict_series(model: FwfModel, series_x) -> np.ndarray:
    """
    Run the filter along a series.

    Entry i is the estimate of z at time (L - 1 + i) + horizon made from the
    window ending at time L - 1 + i.
    """
    x = np.asarray(series_x, dtype=float)
    if x.ndim != 1 or x.size < model.lags:
        raise InvalidInputError(f"series must hold at least L={model.lags} samples")
    windows = sliding_window_view(x, model.lags)[:, ::-1]
    return predict_batch(model, windows)


def theoretical_mmse(model: FwfModel) -> float:
    """E[Z^2] - rho^T U^+ rho recorded at fit time."""
    return model.theoretical_mmse


def extract_modes(model: FwfModel, grid) -> ModeSet:
    """
    Sample every per-lag mode f_tau on a grid and score its flatness.

    Flatness of lag tau is the variance of f_tau over the grid points inside
    the training support; if none fall inside it the whole grid is used.
    """
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0:
        raise InvalidInputError("mode grid must not be empty")
    if not np.all(np.isfinite(grid)):
        raise InvalidInputError("mode grid must be finite")

    functions = model.weight_tensor() @ map_samples(grid, model.spec).T
    low, high = model.support
    inside = (grid >= low) & (grid <= high)
    if not np.any(inside):
        logger.warning(f"No grid point lies in the training support [{low:.4g}, {high:.4g}]; scoring flatness on the whole grid")
        inside = np.ones(grid.shape, dtype=bool)
    flatness = np.var(functions[:, inside], axis=1)
    return ModeSet(grid=grid, functions=functions, flatness=flatness, support=model.support)


def wiener_equation_residual(model: FwfModel, u: MomentCorrentropy) -> float:
    """
    ||U_M w* - P rho|| / ||rho||, with P the projector onto the eigen-directions
    of U_M retained at the model's cutoff.
    """
    if u.size != model.size:
        raise InvalidInputError(f"U_M has dimension {u.size}, model has {model.size}")
    norm = float(np.linalg.norm(model.rho))
    if norm == 0.0:
        return 0.0
    pinv = pseudo_inverse(u, model.pinv_cutoff, model.ridge or None)
    if pinv.ridge > 0.0:
        residual = u.matrix @ model.weights + pinv.ridge * model.weights - model.rho
    else:
        basis = pinv.retained_vectors
        residual = u.matrix @ model.weights - basis @ (basis.T @ model.rho)
    return float(np.linalg.norm(residual)) / norm
