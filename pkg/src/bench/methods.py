"""
Uniform fit/predict entry points over every method the harness runs.
"""
from functools import singledispatch
from typing import Any, Dict, Union
import logging

import numpy as np

from ..baselines import DictionaryModel, LinearWienerModel
from ..baselines import predict as baseline_predict
from ..baselines import predict_batch as baseline_predict_batch
from ..baselines.kernel_filters import klms_fit_dataset, krls_fit_dataset, krr_fit, gpr_fit
from ..baselines.wiener import wiener_fit_dataset
from ..config.constants import MethodName
from ..featuremap.models import FeatureMapSpec, WindowedDataset
from ..fwf import FwfModel
from ..fwf import predict as fwf_predict
from ..fwf import predict_batch as fwf_predict_batch
from ..fwf.filter import fit_dataset

logger = logging.getLogger(__name__)

AnyModel = Union[FwfModel, LinearWienerModel, DictionaryModel]


def fit_method(name: MethodName, dataset: WindowedDataset, params: Dict[str, Any]) -> AnyModel:
    """
    Fit one method on a windowed training set.

    ``params`` is one entry of MethodSpec.configurations().
    """
    name = MethodName(name)
    if name == MethodName.FWF:
        spec = FeatureMapSpec(sigma=params["sigma"], dims=params["dims"])
        return fit_dataset(dataset, spec, epsilon=params["epsilon"])
    if name == MethodName.WIENER:
        return wiener_fit_dataset(dataset, epsilon=params["epsilon"])
    if name == MethodName.KLMS:
        return klms_fit_dataset(dataset, params["sigma"], params["step_size"])
    if name == MethodName.KRLS:
        return krls_fit_dataset(dataset, params["sigma"], params["ridge"])
    if name == MethodName.KRR:
        return krr_fit(dataset.windows, dataset.targets, params["sigma"], params["ridge"], dataset.horizon)
    return gpr_fit(dataset.windows, dataset.targets, params["sigma"], params["ridge"], dataset.horizon)


@singledispatch
def predict_window(model, window) -> float:
    """One prediction from any fitted model."""
    raise TypeError(f"unsupported model type {type(model).__name__}")


@singledispatch
def predict_windows(model, windows) -> np.ndarray:
    """Predictions for an N x L array from any fitted model."""
    raise TypeError(f"unsupported model type {type(model).__name__}")


predict_window.register(FwfModel, fwf_predict)
predict_window.register(LinearWienerModel, baseline_predict)
predict_window.register(DictionaryModel, baseline_predict)
predict_windows.register(FwfModel, fwf_predict_batch)
predict_windows.register(LinearWienerModel, baseline_predict_batch)
predict_windows.register(DictionaryModel, baseline_predict_batch)


def mse(model: AnyModel, dataset: WindowedDataset) -> float:
    residual = dataset.targets - predict_windows(model, dataset.windows)
    return float(np.mean(residual ** 2))
