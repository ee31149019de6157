"""
Functional Wiener Filter package: closed-form fit, prediction, theoretical
MMSE, mode extraction and the model file envelope.
"""
from .models import FwfModel, ModeSet
from .filter import (
    estimate_rho,
    extract_modes,
    fit,
    fit_dataset,
    predict,
    predict_batch,
    predict_series,
    theoretical_mmse,
    wiener_equation_residual,
)
from .storage import (
    decode_envelope,
    encode_envelope,
    load_model,
    read_envelope,
    save_model,
    save_modes_csv,
    write_envelope,
)

__all__ = [
    # Models
    'FwfModel',
    'ModeSet',
    # Filter
    'estimate_rho',
    'extract_modes',
    'fit',
    'fit_dataset',
    'predict',
    'predict_batch',
    'predict_series',
    'theoretical_mmse',
    'wiener_equation_residual',
    # Storage
    'decode_envelope',
    'encode_envelope',
    'load_model',
    'read_envelope',
    'save_model',
    'save_modes_csv',
    'write_envelope',
]
