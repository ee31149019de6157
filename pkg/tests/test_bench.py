"""
Tests for the benchmark harness.

This module tests:
- Experiment config validation and loading
- Cell grid execution, fold aggregation and configuration selection
- Kernel-size grid search
- Figure tables, report files and their schemas
- Latency probes
"""

import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError
from scipy.stats import spearmanr

from src.bench import (
    FIGURE_COLUMNS,
    ExperimentSpec,
    MethodSpec,
    MmseSweepSpec,
    ModeExtractionSpec,
    PredictionsSpec,
    emit_all,
    emit_plot_data,
    figure_table,
    grid_search_sigma,
    load_experiment_spec,
    load_report,
    report_document,
    run_experiment,
    timing_probe,
    write_report,
)
from src.bench.models import ExperimentReport
from src.bench.runner import check_converged
from src.baselines import klms_fit
from src.config import Settings
from src.config.constants import DEFAULT_NOISE_LEVELS, FigureId, MethodName, SeriesKind
from src.datagen import SeriesSpec, StationaryParams, embed_windows, gen_mackey_glass, kfold_splits
from src.exceptions import ConfigError, FilterDivergedError, InvalidInputError, MissingAxisError
from src.featuremap import FeatureMapSpec
from src.fwf import fit

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def small_experiment(**overrides) -> ExperimentSpec:
    """Two methods, two sample sizes, two folds on a short synthetic series."""
    values = {
        "task": SeriesSpec(kind=SeriesKind.STATIONARY_SYSTEM, length=600, seed=3),
        "methods": [
            MethodSpec(name=MethodName.FWF, sigmas=[1.0, 2.0], dims=[5], lags=[5]),
            MethodSpec(name=MethodName.WIENER, lags=[5]),
        ],
        "sample_sizes": [100, 200],
        "folds": 2,
        "test_len": 100,
        "horizon": 0,
        "noise_levels": [0.0],
    }
    values.update(overrides)
    return ExperimentSpec(**values)


def zero_task() -> SeriesSpec:
    return SeriesSpec(
        kind=SeriesKind.STATIONARY_SYSTEM, length=400, stationary=StationaryParams(zero_input=True)
    )


class TestExperimentSpec:
    """Test config validation."""

    @pytest.mark.unit
    def test_unknown_key_rejected(self):
        with pytest.raises(ValidationError):
            MethodSpec(name=MethodName.FWF, sigma=[1.0])

    @pytest.mark.unit
    def test_empty_grid_rejected(self):
        with pytest.raises(ValidationError, match="must not be empty"):
            MethodSpec(name=MethodName.FWF, sigmas=[])

    @pytest.mark.unit
    def test_krr_needs_positive_ridge(self):
        with pytest.raises(ValidationError):
            MethodSpec(name=MethodName.KRR, ridges=[0.0])

    @pytest.mark.unit
    def test_duplicate_methods_rejected(self):
        with pytest.raises(ValidationError, match="only once"):
            small_experiment(methods=[MethodSpec(name=MethodName.WIENER), MethodSpec(name=MethodName.WIENER)])

    @pytest.mark.unit
    def test_configurations_cover_grid(self):
        method = MethodSpec(name=MethodName.KLMS, sigmas=[1.0, 2.0], lags=[3], step_sizes=[0.1, 0.5, 0.9])
        configurations = method.configurations()
        assert len(configurations) == 6
        assert configurations[0] == {"sigma": 1.0, "lags": 3, "step_size": 0.1}

    @pytest.mark.unit
    def test_spec_hash_ignores_output_dir(self):
        assert small_experiment(output_dir="a").spec_hash() == small_experiment(output_dir="b").spec_hash()
        assert small_experiment().spec_hash() != small_experiment(folds=1).spec_hash()

    @pytest.mark.unit
    def test_default_noise_grid(self):
        spec = ExperimentSpec(task=zero_task(), methods=[MethodSpec(name=MethodName.WIENER)])
        assert spec.noise_levels == list(DEFAULT_NOISE_LEVELS)

    @pytest.mark.unit
    def test_settings_fill_unset_run_options(self):
        spec = ExperimentSpec(task=zero_task(), methods=[MethodSpec(name=MethodName.WIENER)])
        assert (spec.output_dir, spec.n_jobs) == (None, None)

        resolved = spec.with_settings(Settings(output_dir="runs", n_jobs=2, default_seed=11))

        assert resolved.output_dir == "runs"
        assert resolved.n_jobs == 2
        assert resolved.task.seed == 11

    @pytest.mark.unit
    def test_explicit_run_options_win_over_settings(self):
        spec = small_experiment(output_dir="mine", n_jobs=1)
        resolved = spec.with_settings(Settings(output_dir="runs", n_jobs=2, default_seed=11))
        assert (resolved.output_dir, resolved.n_jobs, resolved.task.seed) == ("mine", 1, 3)

    @pytest.mark.unit
    def test_load_from_file(self, tmp_path):
        path = tmp_path / "experiment.json"
        path.write_text(small_experiment().model_dump_json())
        assert load_experiment_spec(path) == small_experiment()

    @pytest.mark.unit
    def test_typo_in_file_names_location(self, tmp_path):
        document = json.loads(small_experiment().model_dump_json())
        document["methods"][0]["sigmaz"] = [1.0]
        path = tmp_path / "experiment.json"
        path.write_text(json.dumps(document))
        with pytest.raises(ConfigError, match="methods.0.sigmaz"):
            load_experiment_spec(path)

    @pytest.mark.unit
    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_experiment_spec(tmp_path / "absent.json")

    @pytest.mark.unit
    @pytest.mark.parametrize("name", ["stationary_system.json", "mackey_glass.json", "lorenz.json"])
    def test_bundled_configs_validate(self, name):
        spec = load_experiment_spec(CONFIG_DIR / name)
        needed = spec.folds * spec.test_len + max(spec.sample_sizes)
        assert spec.task.length >= needed


class TestRunExperiment:
    """Test the cell grid and its reduction."""

    @pytest.mark.integration
    def test_cell_and_selection_counts(self):
        report = run_experiment(small_experiment())
        # fwf: 2 sigmas x 2 N x 2 folds, wiener: 2 N x 2 folds
        assert len(report.cells) == 12
        assert (report.cells["status"] == "ok").all()
        assert len(report.summary) == 6
        assert len(report.selected) == 4
        assert set(report.selected["method"]) == {"fwf", "wiener"}
        assert report.failed_methods == []

    @pytest.mark.integration
    def test_report_is_deterministic(self):
        first = json.dumps(report_document(run_experiment(small_experiment())), sort_keys=True, default=str)
        second = json.dumps(report_document(run_experiment(small_experiment())), sort_keys=True, default=str)
        assert first == second

    @pytest.mark.integration
    def test_parallel_cells_match_serial(self):
        serial = run_experiment(small_experiment()).cells
        parallel = run_experiment(small_experiment(n_jobs=2)).cells
        assert serial["method"].tolist() == parallel["method"].tolist()
        assert serial["config_id"].tolist() == parallel["config_id"].tolist()
        np.testing.assert_allclose(parallel["test_mse"], serial["test_mse"], rtol=1e-8)

    @pytest.mark.integration
    def test_zero_task_gives_zero_mse(self):
        spec = small_experiment(
            task=zero_task(),
            methods=[MethodSpec(name=MethodName.FWF, dims=[4], lags=[3])],
            sample_sizes=[100],
            folds=1,
        )
        report = run_experiment(spec)
        assert report.cells["train_mse"].tolist() == [0.0]
        assert report.cells["test_mse"].tolist() == [0.0]

    @pytest.mark.integration
    def test_failed_cells_are_recorded(self):
        spec = small_experiment(
            task=zero_task(),
            methods=[
                # all-zero windows: the Gram matrix is all ones and the ridge is too small to lift it
                MethodSpec(name=MethodName.KRR, lags=[3], ridges=[1e-300]),
                MethodSpec(name=MethodName.WIENER, lags=[3]),
            ],
            sample_sizes=[100],
        )
        report = run_experiment(spec)
        krr = report.cells[report.cells["method"] == "krr"]
        assert (krr["status"] == "failed").all()
        assert krr["error"].str.startswith("conditioning").all()
        assert report.failed_methods == ["krr"]
        assert list(report.selected["method"]) == ["wiener"]

    @pytest.mark.integration
    def test_diverging_klms_is_recorded_as_failed(self, tmp_path):
        # with the kernel near 1 the running estimate follows S <- (1 - eta) S + eta z, unstable for eta > 2
        spec = small_experiment(
            methods=[
                MethodSpec(name=MethodName.KLMS, sigmas=[100.0], lags=[5], step_sizes=[2.5]),
                MethodSpec(name=MethodName.WIENER, lags=[5]),
            ],
            sample_sizes=[200],
        )
        report = run_experiment(spec)
        klms = report.cells[report.cells["method"] == "klms"]
        assert (klms["status"] == "failed").all()
        assert klms["error"].str.startswith("filter_diverged").all()
        assert report.failed_methods == ["klms"]

        write_report(report, tmp_path)
        json.dumps(report_document(report), allow_nan=False, default=str)

    @pytest.mark.integration
    def test_non_finite_mse_is_null_in_report(self, tmp_path):
        report = run_experiment(small_experiment(methods=[MethodSpec(name=MethodName.WIENER, lags=[5])]))
        report.cells.loc[0, "test_mse"] = np.inf
        document = report_document(report)
        assert document["cells"][0]["test_mse"] is None
        write_report(report, tmp_path)
        assert json.loads((tmp_path / "report.json").read_text())["cells"][0]["test_mse"] is None

    @pytest.mark.integration
    def test_run_options_fall_back_to_settings(self, monkeypatch):
        monkeypatch.setenv("N_JOBS", "2")
        monkeypatch.setenv("OUTPUT_DIR", "from_env")
        report = run_experiment(small_experiment())
        assert report.spec.n_jobs == 2
        assert report.spec.output_dir == "from_env"
        assert report.spec_hash == small_experiment().spec_hash()

    @pytest.mark.integration
    def test_oversized_sample_size_is_skipped(self):
        report = run_experiment(small_experiment(sample_sizes=[100, 10000]))
        skipped = report.cells[report.cells["N"] == 10000]
        assert len(skipped) > 0
        assert (skipped["status"] == "failed").all()
        assert set(report.selected["N"]) == {100}

    @pytest.mark.integration
    def test_cells_are_traceable(self):
        spec = small_experiment()
        report = run_experiment(spec)
        assert (report.cells["spec_hash"] == spec.spec_hash()).all()
        assert (report.cells["seed"] == 3).all()
        assert set(report.cells["fold"]) == {0, 1}

    @pytest.mark.integration
    def test_noise_levels_share_splits(self):
        spec = small_experiment(
            methods=[MethodSpec(name=MethodName.WIENER, lags=[5])],
            sample_sizes=[200],
            noise_levels=[0.0, 0.1],
        )
        report = run_experiment(spec)
        assert sorted(report.selected["noise_std"]) == [0.0, 0.1]


class TestReferenceTasks:
    """Test the full pipeline on the reference prediction tasks."""

    @pytest.mark.slow
    def test_fwf_beats_baselines_on_stationary_system(self):
        spec = ExperimentSpec(
            task=SeriesSpec(kind=SeriesKind.STATIONARY_SYSTEM, length=4000, seed=42),
            methods=[
                MethodSpec(name=MethodName.FWF, sigmas=[2.0], dims=[30], lags=[5]),
                MethodSpec(name=MethodName.WIENER, lags=[5]),
                MethodSpec(name=MethodName.KLMS, sigmas=[1.0, 2.0], lags=[5], step_sizes=[0.5]),
                MethodSpec(name=MethodName.KRR, sigmas=[1.0, 2.0], lags=[5], ridges=[0.001, 0.01]),
            ],
            sample_sizes=[2000],
            folds=5,
            test_len=300,
            horizon=0,
            noise_levels=[0.0],
            n_jobs=1,
        )
        report = run_experiment(spec)

        assert (report.cells["status"] == "ok").all()
        selected = report.selected.set_index("method")["test_mse_mean"]
        for baseline in ("wiener", "klms", "krr"):
            assert selected["fwf"] <= selected[baseline]

    @pytest.mark.slow
    def test_mackey_glass_training_mse_meets_theoretical_mmse(self):
        spec = ExperimentSpec(
            task=SeriesSpec(kind=SeriesKind.MACKEY_GLASS, length=3000, seed=7),
            methods=[MethodSpec(name=MethodName.WIENER, lags=[5])],
            sample_sizes=[2000],
            folds=2,
            test_len=300,
            horizon=1,
            noise_levels=[0.0],
            n_jobs=1,
            mmse_sweep=MmseSweepSpec(sigma=0.25, dims=[5, 10, 20], lags=[3, 5, 7], sample_size=2000),
        )
        table = figure_table(run_experiment(spec), FigureId.MMSE_SWEEP)

        assert len(table) == 9
        assert table[["train_mse", "theoretical_mse"]].notna().all().all()
        np.testing.assert_allclose(table["train_mse"], table["theoretical_mse"], rtol=0, atol=1e-6)

    @pytest.mark.slow
    def test_lorenz_config_runs(self, tmp_path):
        spec = load_experiment_spec(CONFIG_DIR / "lorenz.json").model_copy(update={"n_jobs": 1})
        report = run_experiment(spec)

        assert (report.cells["status"] == "ok").all()
        assert report.failed_methods == []
        names = sorted(path.name for path in emit_all(report, tmp_path))
        assert names == sorted(["mse_vs_samples.csv", "mse_vs_noise.csv", "dims_sweep.csv", "predictions.csv"])

        selected = report.selected.set_index(["method", "N"])["test_mse_mean"]
        # z depends on x only through the nonlinear coupling, out of reach of a linear filter
        assert selected[("fwf", 2000)] < 0.1
        assert selected[("fwf", 2000)] < selected[("wiener", 2000)]

    @pytest.mark.slow
    def test_noisy_mackey_glass_degrades_with_noise(self):
        spec = ExperimentSpec(
            task=SeriesSpec(kind=SeriesKind.MACKEY_GLASS, length=4000, seed=7),
            methods=[MethodSpec(name=MethodName.FWF, sigmas=[0.5], dims=[20], lags=[7])],
            sample_sizes=[2000],
            folds=5,
            test_len=300,
            horizon=1,
            n_jobs=1,
        )
        report = run_experiment(spec)

        table = figure_table(report, FigureId.MSE_VS_NOISE).sort_values("noise_std")
        assert table["noise_std"].tolist() == list(DEFAULT_NOISE_LEVELS)
        assert table["mse_mean"].is_monotonic_increasing


class TestConvergenceCheck:
    """Test the divergence guard applied to every cell."""

    @pytest.mark.unit
    @pytest.mark.parametrize("train,test", [(np.inf, 0.1), (0.1, np.nan), (0.1, 1e18)])
    def test_rejects_blown_up_errors(self, train, test):
        with pytest.raises(FilterDivergedError, match="non-finite or above"):
            check_converged(train, test, np.ones(10))

    @pytest.mark.unit
    def test_accepts_ordinary_errors(self):
        check_converged(0.5, 2.0, np.ones(10))

    @pytest.mark.unit
    def test_zero_power_only_rejects_non_finite(self):
        check_converged(0.0, 1e-3, np.zeros(10))
        with pytest.raises(FilterDivergedError):
            check_converged(0.0, np.inf, np.zeros(10))


class TestGridSearch:
    """Test kernel-size selection."""

    @pytest.mark.unit
    def test_single_sigma(self, stationary_series):
        plan = kfold_splits(1200, folds=2, test_len=200, train_len=400)
        best, table = grid_search_sigma(
            MethodSpec(name=MethodName.FWF, dims=[4], lags=[5]), stationary_series, [1.3], plan
        )
        assert best == 1.3
        assert len(table) == 1

    @pytest.mark.unit
    def test_ties_go_to_larger_sigma(self):
        x = np.zeros(600)
        plan = kfold_splits(600, folds=2, test_len=100, train_len=200)
        best, table = grid_search_sigma(
            MethodSpec(name=MethodName.FWF, dims=[3], lags=[2]), (x, x), [0.5, 2.0, 1.0], plan
        )
        assert (table["test_mse_mean"] == 0.0).all()
        assert best == 2.0

    @pytest.mark.unit
    def test_empty_grid(self, stationary_series):
        plan = kfold_splits(1200, folds=1, test_len=200)
        with pytest.raises(ConfigError):
            grid_search_sigma(MethodSpec(name=MethodName.FWF), stationary_series, [], plan)

    @pytest.mark.slow
    def test_theoretical_mmse_tracks_test_mse(self):
        series = gen_mackey_glass(2600)
        plan = kfold_splits(2600, folds=2, test_len=300, train_len=2000)
        sigmas = [0.25, 0.35, 0.5, 0.7, 1.0, 1.4, 2.0, 2.8]
        _, table = grid_search_sigma(
            MethodSpec(name=MethodName.FWF, dims=[8], lags=[6]), (series, series), sigmas, plan, horizon=1
        )
        correlation = spearmanr(table["theoretical_mmse_mean"], table["test_mse_mean"]).correlation
        assert correlation >= 0.6


class TestFigures:
    """Test figure tables and report files."""

    @pytest.fixture(scope="class")
    def report(self):
        spec = small_experiment(
            noise_levels=[0.0, 0.05],
            mmse_sweep=MmseSweepSpec(sigma=1.5, dims=[2, 4, 6], lags=[3, 5], sample_size=200),
            mode_extraction=ModeExtractionSpec(sigma=1.5, dims=5, lags=5, sample_size=200, grid_points=11),
            predictions=PredictionsSpec(fold=0),
        )
        return run_experiment(spec)

    @pytest.mark.integration
    def test_mse_vs_samples_uses_lowest_noise(self, report):
        table = figure_table(report, FigureId.MSE_VS_SAMPLES)
        assert list(table.columns) == FIGURE_COLUMNS[FigureId.MSE_VS_SAMPLES]
        assert len(table) == 4

    @pytest.mark.integration
    def test_mse_vs_noise_uses_largest_n(self, report):
        table = figure_table(report, FigureId.MSE_VS_NOISE)
        assert set(table["N"]) == {200}
        assert sorted(table["noise_std"].unique()) == [0.0, 0.05]

    @pytest.mark.integration
    def test_mmse_sweep_has_one_row_per_point(self, report):
        table = figure_table(report, FigureId.MMSE_SWEEP)
        assert len(table) == 3 * 2
        assert list(table.columns) == ["D", "L", "train_mse", "theoretical_mse", "test_mse"]
        np.testing.assert_allclose(table["train_mse"], table["theoretical_mse"], rtol=1e-4, atol=1e-6)

    @pytest.mark.integration
    def test_modes_table(self, report):
        table = figure_table(report, FigureId.MODES)
        assert list(table.columns) == ["tau", "x", "f"]
        assert len(table) == 5 * 11

    @pytest.mark.integration
    def test_predictions_table(self, report):
        table = figure_table(report, FigureId.PREDICTIONS)
        assert set(table["method"]) == {"fwf", "wiener"}
        assert len(table) == 2 * 2 * 100

    @pytest.mark.integration
    def test_missing_section_names_column(self, report):
        with pytest.raises(MissingAxisError) as info:
            figure_table(report, FigureId.DIMS_SWEEP)
        assert info.value.column == "D"

    @pytest.mark.integration
    def test_emitted_csv_matches_table(self, report, tmp_path):
        path = emit_plot_data(report, FigureId.MSE_VS_SAMPLES, tmp_path)
        reparsed = pd.read_csv(path, float_precision="round_trip")
        pd.testing.assert_frame_equal(reparsed, figure_table(report, FigureId.MSE_VS_SAMPLES), check_dtype=False)

    @pytest.mark.integration
    def test_emit_all_skips_absent_sections(self, report, tmp_path):
        names = sorted(path.name for path in emit_all(report, tmp_path))
        assert names == sorted([
            "mse_vs_samples.csv", "mse_vs_noise.csv", "mmse_sweep.csv", "modes.csv", "predictions.csv",
        ])

    @pytest.mark.integration
    def test_report_files_round_trip(self, report, tmp_path):
        write_report(report, tmp_path)
        loaded = load_report(tmp_path)
        assert loaded.spec_hash == report.spec_hash
        assert loaded.spec == report.spec
        pd.testing.assert_frame_equal(
            figure_table(loaded, FigureId.MSE_VS_SAMPLES),
            figure_table(report, FigureId.MSE_VS_SAMPLES),
            check_dtype=False,
        )
        assert len(loaded.cells) == len(report.cells)

    @pytest.mark.unit
    def test_empty_report_gives_header_only_files(self, tmp_path):
        spec = small_experiment()
        empty = ExperimentReport(spec=spec, spec_hash=spec.spec_hash())
        path = emit_plot_data(empty, FigureId.MSE_VS_SAMPLES, tmp_path)
        assert path.read_text().strip() == "method,N,mse_mean,mse_var"


class TestTimingProbe:
    """Test latency probes."""

    @pytest.mark.unit
    def test_rejects_few_repeats(self, fitted_model):
        with pytest.raises(InvalidInputError, match="at least 30"):
            timing_probe(fitted_model, np.zeros((3, 5)), repeats=29)

    @pytest.mark.unit
    def test_rejects_empty_set(self, fitted_model):
        with pytest.raises(InvalidInputError):
            timing_probe(fitted_model, np.zeros((0, 5)))

    @pytest.mark.unit
    def test_reports_feature_dimension(self, fitted_model, rng):
        stats = timing_probe(fitted_model, rng.normal(size=(10, 5)), repeats=30, warmup=5)
        assert stats.feature_dimension == 25
        assert stats.repeats == 30
        assert stats.samples_per_repeat == 10
        assert stats.median_ns > 0
        assert stats.iqr_ns >= 0

    @pytest.mark.unit
    def test_baselines_have_no_feature_dimension(self, rng):
        x = rng.normal(size=60)
        model = klms_fit(x, x, lags=3, horizon=0, sigma=1.0, step_size=0.5)
        dataset = embed_windows(x, x, 3, 0)
        stats = timing_probe(model, dataset, repeats=30, warmup=0)
        assert stats.feature_dimension is None

    @pytest.mark.slow
    def test_fwf_latency_independent_of_training_size(self, rng):
        x = rng.normal(size=4500)
        z = np.tanh(x)
        spec = FeatureMapSpec(sigma=1.0, dims=10)
        small = fit(x[:500], z[:500], lags=5, spec=spec, horizon=0)
        large = fit(x[:4000], z[:4000], lags=5, spec=spec, horizon=0)
        windows = embed_windows(x[4000:], z[4000:], 5, 0).windows
        fast = timing_probe(small, windows, repeats=30)
        slow = timing_probe(large, windows, repeats=30)
        assert abs(slow.median_ns - fast.median_ns) < 0.2 * fast.median_ns

    @pytest.mark.slow
    def test_klms_latency_grows_with_dictionary(self, rng):
        x = rng.normal(size=4300)
        z = np.tanh(x)
        small = klms_fit(x[:500], z[:500], lags=5, horizon=0, sigma=1.0, step_size=0.5)
        large = klms_fit(x[:4000], z[:4000], lags=5, horizon=0, sigma=1.0, step_size=0.5)
        windows = embed_windows(x[4000:], z[4000:], 5, 0).windows
        assert timing_probe(large, windows, repeats=30).median_ns > 4 * timing_probe(small, windows, repeats=30).median_ns
