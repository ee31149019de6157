"""
Explicit feature map package: scalars and windows into H_RB.
"""
from .models import FeatureMapSpec, WindowEmbedding, WindowedDataset
from .mapping import (
    embed_dataset,
    gaussian_kernel,
    map_multivariate,
    map_samples,
    map_scalar,
    map_window,
    map_windows,
    multivariate_index_tuples,
    multivariate_size,
    truncated_kernel,
    truncated_kernel_multivariate,
    truncation_tail_bound,
)

__all__ = [
    # Models
    'FeatureMapSpec',
    'WindowEmbedding',
    'WindowedDataset',
    # Mapping
    'embed_dataset',
    'gaussian_kernel',
    'map_multivariate',
    'map_samples',
    'map_scalar',
    'map_window',
    'map_windows',
    'multivariate_index_tuples',
    'multivariate_size',
    'truncated_kernel',
    'truncated_kernel_multivariate',
    'truncation_tail_bound',
]
