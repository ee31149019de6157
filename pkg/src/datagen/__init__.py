"""
Data generation package: experimental signals, noise, windowing, folds and CSV I/O.
"""
from .models import (
    CsvSource,
    FoldPlan,
    LorenzParams,
    MackeyGlassParams,
    SeriesSpec,
    StationaryParams,
)
from .streams import stream
from .generators import (
    add_noise,
    gen_lorenz,
    gen_mackey_glass,
    gen_stationary_system,
    generate_series,
    stationary_system_components,
    stationary_system_memory_depth,
    stationary_system_response,
)
from .windowing import embed_windows, fold_datasets, kfold_splits
from .io import denormalize, export_series_csv, load_csv, normalize

__all__ = [
    # Models
    'CsvSource',
    'FoldPlan',
    'LorenzParams',
    'MackeyGlassParams',
    'SeriesSpec',
    'StationaryParams',
    # Random streams
    'stream',
    # Generators
    'add_noise',
    'gen_lorenz',
    'gen_mackey_glass',
    'gen_stationary_system',
    'generate_series',
    'stationary_system_components',
    'stationary_system_memory_depth',
    'stationary_system_response',
    # Windowing
    'embed_windows',
    'fold_datasets',
    'kfold_splits',
    # I/O
    'denormalize',
    'export_series_csv',
    'load_csv',
    'normalize',
]
