"""
Reference filters: linear Wiener, KLMS, KRLS, KRR and its GPR label.
"""
from functools import singledispatch

import numpy as np

from .models import DictionaryModel, LinearWienerModel
from .wiener import wiener_fit, wiener_fit_dataset, wiener_predict, wiener_predict_batch
from .kernel_filters import (
    dictionary_predict,
    dictionary_predict_batch,
    gaussian_gram,
    gpr_fit,
    klms_fit,
    klms_fit_dataset,
    krls_fit,
    krls_fit_dataset,
    krr_fit,
    training_mse,
)
from .storage import decode_baseline, encode_baseline, load_baseline, save_baseline


@singledispatch
def predict(model, window) -> float:
    """Prediction of any baseline for one newest-first window."""
    raise TypeError(f"no baseline predictor for {type(model).__name__}")


@singledispatch
def predict_batch(model, windows) -> np.ndarray:
    """Predictions of any baseline for an N x L array of windows."""
    raise TypeError(f"no baseline predictor for {type(model).__name__}")


predict.register(LinearWienerModel, wiener_predict)
predict.register(DictionaryModel, dictionary_predict)
predict_batch.register(LinearWienerModel, wiener_predict_batch)
predict_batch.register(DictionaryModel, dictionary_predict_batch)

__all__ = [
    # Models
    'DictionaryModel',
    'LinearWienerModel',
    # Fits
    'gpr_fit',
    'klms_fit',
    'klms_fit_dataset',
    'krls_fit',
    'krls_fit_dataset',
    'krr_fit',
    'wiener_fit',
    'wiener_fit_dataset',
    # Prediction
    'dictionary_predict',
    'dictionary_predict_batch',
    'gaussian_gram',
    'predict',
    'predict_batch',
    'training_mse',
    'wiener_predict',
    'wiener_predict_batch',
    # Storage
    'decode_baseline',
    'encode_baseline',
    'load_baseline',
    'save_baseline',
]
