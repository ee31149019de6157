"""
Moment-wise correntropy package: U_M estimation, spectral pseudo-inverse and
the kernels/diagnostics derived from them.
"""
from .models import MomentCorrentropy, SpectralPseudoInverse
from .estimator import MomentAccumulator, estimate_u, tensor_entry
from .spectral import pinv_from_eigensystem, pseudo_inverse, spectral_pinv
from .diagnostics import (
    correntropy_block_trace,
    correntropy_matrix,
    direct_correntropy,
    ku_gram,
    ku_kernel,
)

__all__ = [
    # Models
    'MomentCorrentropy',
    'SpectralPseudoInverse',
    # Estimation
    'MomentAccumulator',
    'estimate_u',
    'tensor_entry',
    # Inversion
    'pinv_from_eigensystem',
    'pseudo_inverse',
    'spectral_pinv',
    # Diagnostics
    'correntropy_block_trace',
    'correntropy_matrix',
    'direct_correntropy',
    'ku_gram',
    'ku_kernel',
]
