"""
Linear Wiener filter in the input space.

R and rho_z are the plug-in moments of the same windows the FWF uses; the
weights come from the shared eigen-based pseudo-inverse.
"""
import logging

import numpy as np

from ..config.constants import DEFAULT_HORIZON, DEFAULT_PINV_EPSILON, ERROR_LENGTH_MISMATCH
from ..correntropy.spectral import spectral_pinv
from ..datagen.windowing import embed_windows
from ..exceptions import InvalidInputError
from ..featuremap.models import WindowedDataset
from .models import LinearWienerModel

logger = logging.getLogger(__name__)


def wiener_fit_dataset(dataset: WindowedDataset, epsilon: float = DEFAULT_PINV_EPSILON) -> LinearWienerModel:
    """Fit on an already windowed dataset."""
    windows = dataset.windows
    count = dataset.sample_count
    autocorrelation = windows.T @ windows / count
    autocorrelation = 0.5 * (autocorrelation + autocorrelation.T)
    crosscorrelation = windows.T @ dataset.targets / count
    pinv = spectral_pinv(autocorrelation, epsilon)
    weights = pinv.matrix @ crosscorrelation
    logger.info(f"Wiener fit: L={dataset.lags}, N'={count}, rank={pinv.effective_rank}/{dataset.lags}")
    return LinearWienerModel(
        lags=dataset.lags,
        weights=weights,
        autocorrelation=autocorrelation,
        crosscorrelation=crosscorrelation,
        horizon=dataset.horizon,
        pinv_cutoff=epsilon,
        effective_rank=pinv.effective_rank,
    )


def wiener_fit(
    series_x,
    series_z,
    lags: int,
    horizon: int = DEFAULT_HORIZON,
    epsilon: float = DEFAULT_PINV_EPSILON,
) -> LinearWienerModel:
    """
    Fit the FIR Wiener filter w = R^+ rho_z.

    Args:
        series_x: Input series
        series_z: Desired series
        lags: Number of taps L
        horizon: Prediction horizon, as in the FWF fit
        epsilon: Relative eigenvalue cutoff
    """
    return wiener_fit_dataset(embed_windows(series_x, series_z, lags, horizon), epsilon)


def wiener_predict(model: LinearWienerModel, window) -> float:
    window = np.asarray(window, dtype=float)
    if window.shape != (model.lags,):
        raise InvalidInputError(ERROR_LENGTH_MISMATCH.format(expected=model.lags, actual=window.size))
    return float(window @ model.weights)


def wiener_predict_batch(model: LinearWienerModel, windows) -> np.ndarray:
    windows = np.asarray(windows, dtype=float)
    if windows.ndim != 2 or windows.shape[1] != model.lags:
        raise InvalidInputError(ERROR_LENGTH_MISMATCH.format(expected=model.lags, actual=windows.shape[-1]))
    return windows @ model.weights
