"""
Benchmark harness: experiment configs, the cell runner, kernel-size grid
search, latency probes and figure-reproduction tables.
"""
from .models import (
    DimsSweepSpec,
    ExperimentReport,
    ExperimentSpec,
    MethodSpec,
    MmseSweepSpec,
    ModeExtractionSpec,
    PredictionsSpec,
    TimingSpec,
)
from .methods import fit_method, mse, predict_window, predict_windows
from .timing import TimingStats, timing_probe
from .runner import (
    FoldJob,
    fold_data,
    grid_search_sigma,
    load_experiment_spec,
    prepare_inputs,
    run_cell,
    run_experiment,
    select_best,
    summarize_cells,
)
from .emit import (
    FIGURE_COLUMNS,
    available_figures,
    emit_all,
    emit_plot_data,
    figure_table,
    load_report,
    report_document,
    write_report,
)

__all__ = [
    # Models
    'DimsSweepSpec',
    'ExperimentReport',
    'ExperimentSpec',
    'MethodSpec',
    'MmseSweepSpec',
    'ModeExtractionSpec',
    'PredictionsSpec',
    'TimingSpec',
    # Methods
    'fit_method',
    'mse',
    'predict_window',
    'predict_windows',
    # Timing
    'TimingStats',
    'timing_probe',
    # Runner
    'FoldJob',
    'fold_data',
    'grid_search_sigma',
    'load_experiment_spec',
    'prepare_inputs',
    'run_cell',
    'run_experiment',
    'select_best',
    'summarize_cells',
    # Emission
    'FIGURE_COLUMNS',
    'available_figures',
    'emit_all',
    'emit_plot_data',
    'figure_table',
    'load_report',
    'report_document',
    'write_report',
]
