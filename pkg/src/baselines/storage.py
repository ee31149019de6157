"""
Baseline models in the shared model envelope, told apart by the variant tag.
"""
from pathlib import Path
from typing import Union
import logging

import numpy as np

from ..config.constants import MethodName
from ..exceptions import InvalidInputError, ModelFormatError
from ..fwf.storage import decode_envelope, encode_envelope, write_envelope
from .models import DictionaryModel, LinearWienerModel

logger = logging.getLogger(__name__)

BaselineModel = Union[LinearWienerModel, DictionaryModel]

_NONE = float("nan")


def encode_baseline(model: BaselineModel) -> bytes:
    if isinstance(model, LinearWienerModel):
        return encode_envelope(
            MethodName.WIENER.value,
            integers={"lags": model.lags, "horizon": model.horizon, "effective_rank": model.effective_rank},
            scalars={"pinv_cutoff": model.pinv_cutoff},
            arrays={
                "weights": model.weights,
                "autocorrelation": model.autocorrelation,
                "crosscorrelation": model.crosscorrelation,
            },
        )
    arrays = {
        "centers": model.centers,
        "coefficients": model.coefficients,
        "learning_curve": model.learning_curve,
    }
    if model.inverse_gram is not None:
        arrays["inverse_gram"] = model.inverse_gram
    return encode_envelope(
        model.variant,
        integers={"lags": model.lags, "horizon": model.horizon},
        scalars={
            "sigma": model.sigma,
            "step_size": _NONE if model.step_size is None else model.step_size,
            "ridge": _NONE if model.ridge is None else model.ridge,
        },
        arrays=arrays,
    )


def _optional(value: float):
    return None if np.isnan(value) else value


def decode_baseline(data: bytes) -> BaselineModel:
    header, scalars, arrays = decode_envelope(data)
    try:
        variant = MethodName(header.variant)
    except ValueError:
        raise ModelFormatError(f"unknown model variant '{header.variant}'")
    try:
        if variant == MethodName.WIENER:
            return LinearWienerModel(
                lags=header.integers["lags"],
                weights=arrays["weights"],
                autocorrelation=arrays["autocorrelation"],
                crosscorrelation=arrays["crosscorrelation"],
                horizon=header.integers["horizon"],
                pinv_cutoff=scalars["pinv_cutoff"],
                effective_rank=header.integers["effective_rank"],
            )
        if variant == MethodName.FWF:
            raise ModelFormatError("this is an FWF model; load it with fwf.load_model")
        return DictionaryModel(
            variant=variant,
            centers=arrays["centers"],
            coefficients=arrays["coefficients"],
            sigma=scalars["sigma"],
            horizon=header.integers["horizon"],
            step_size=_optional(scalars["step_size"]),
            ridge=_optional(scalars["ridge"]),
            inverse_gram=arrays.get("inverse_gram"),
            learning_curve=arrays["learning_curve"],
        )
    except KeyError as e:
        raise ModelFormatError(f"model file lacks field {e}")
    except InvalidInputError as e:
        raise ModelFormatError(f"inconsistent model file: {e.message}")


def save_baseline(model: BaselineModel, path: Union[str, Path]) -> Path:
    """Write a baseline model tagged with its variant."""
    path = write_envelope(path, encode_baseline(model))
    logger.info(f"Saved {model.variant} model to {path}")
    return path


def load_baseline(path: Union[str, Path]) -> BaselineModel:
    """
    Read a baseline model.

    Raises:
        ModelFormatError: Missing, corrupt or non-baseline file
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except FileNotFoundError:
        raise ModelFormatError(f"model file not found: {path}")
    return decode_baseline(data)
