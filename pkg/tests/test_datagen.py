"""
Tests for data generation, windowing and CSV ingestion.

This module tests:
- Named random streams and determinism
- The synthetic stationary system, Mackey-Glass and Lorenz generators
- Noise injection
- Windowing and contiguous fold plans
- CSV loading, normalization and export
"""

from math import pi

import numpy as np
import pytest
from pydantic import ValidationError

from src.config.constants import NoiseStdMode, NormalizationMode, SeriesKind
from src.datagen import (
    CsvSource,
    SeriesSpec,
    add_noise,
    denormalize,
    embed_windows,
    export_series_csv,
    fold_datasets,
    gen_lorenz,
    gen_mackey_glass,
    gen_stationary_system,
    generate_series,
    kfold_splits,
    load_csv,
    normalize,
    stationary_system_components,
    stationary_system_memory_depth,
    stationary_system_response,
    stream,
)
from src.exceptions import CsvFormatError, InsufficientDataError, InvalidInputError, IntegrationError


class TestStreams:
    """Test named random streams."""

    @pytest.mark.unit
    def test_same_name_same_draws(self):
        np.testing.assert_array_equal(stream(3, "noise").normal(size=5), stream(3, "noise").normal(size=5))

    @pytest.mark.unit
    def test_names_are_independent(self):
        assert not np.array_equal(stream(3, "noise").normal(size=5), stream(3, "other").normal(size=5))

    @pytest.mark.unit
    def test_seeds_differ(self):
        assert not np.array_equal(stream(3, "noise").normal(size=5), stream(4, "noise").normal(size=5))


class TestStationarySystem:
    """Test the memory-depth-5 nonlinear system."""

    @pytest.mark.unit
    def test_zero_input_gives_zero_output(self):
        x, d = gen_stationary_system(50, zero_input=True)
        np.testing.assert_array_equal(x, np.zeros(50))
        np.testing.assert_array_equal(d, np.zeros(50))

    @pytest.mark.unit
    def test_matches_closed_form(self):
        x, d = gen_stationary_system(40, seed=2)
        n = 20
        expected = (
            0.5 * np.tanh(x[n]) ** 2
            + np.sin(x[n - 1]) ** 3
            + 0.5 * np.tanh(x[n - 2]) ** 3
            + 0.2 * np.sin(x[n - 3]) ** 2
            + 0.75 * np.tanh(x[n - 4]) ** 2
        )
        assert d[n] == pytest.approx(expected, abs=1e-13)

    @pytest.mark.unit
    def test_memory_depth(self, rng):
        x = rng.normal(size=30)
        perturbed = x.copy()
        perturbed[10] += 5.0
        base = stationary_system_response(x)
        moved = stationary_system_response(perturbed)
        assert moved[15] == base[15]
        assert moved[14] != base[14]
        assert stationary_system_memory_depth() == 5
        assert len(stationary_system_components()) == 5

    @pytest.mark.unit
    def test_deterministic(self):
        a = gen_stationary_system(100, seed=11)
        b = gen_stationary_system(100, seed=11)
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])

    @pytest.mark.unit
    def test_rejects_short_series(self):
        with pytest.raises(InvalidInputError):
            gen_stationary_system(5)

    @pytest.mark.slow
    def test_input_variance_is_pi(self):
        x, _ = gen_stationary_system(10 ** 6, seed=1)
        assert np.var(x) == pytest.approx(pi, rel=0.01)

    @pytest.mark.unit
    def test_std_mode(self):
        x, _ = gen_stationary_system(20000, seed=1, std_mode=NoiseStdMode.STD)
        assert np.std(x) == pytest.approx(pi, rel=0.05)


class TestMackeyGlass:
    """Test the delay differential equation integrator."""

    @pytest.mark.unit
    def test_zero_history_is_fixed_point(self):
        np.testing.assert_array_equal(gen_mackey_glass(50, history=0.0), np.zeros(50))

    @pytest.mark.unit
    def test_unit_equilibrium(self):
        series = gen_mackey_glass(50, beta=0.2, gamma=0.1, power=10.0, history=1.0)
        np.testing.assert_allclose(series, np.ones(50), atol=1e-9)

    @pytest.mark.unit
    def test_deterministic_seeded_history(self):
        a = gen_mackey_glass(30, seed=5, transient_steps=100)
        b = gen_mackey_glass(30, seed=5, transient_steps=100)
        np.testing.assert_array_equal(a, b)

    @pytest.mark.unit
    def test_rejects_non_positive_parameters(self):
        with pytest.raises(InvalidInputError, match="delay"):
            gen_mackey_glass(10, delay=0.0)

    @pytest.mark.unit
    def test_divergence_raises(self):
        with pytest.raises(IntegrationError):
            gen_mackey_glass(100, beta=1e9, power=1.0, history=1.0)

    @pytest.mark.slow
    def test_step_refinement(self):
        coarse = gen_mackey_glass(500, dt=0.1, subsample=6, transient_steps=1000)
        fine = gen_mackey_glass(500, dt=0.05, subsample=12, transient_steps=2000)
        assert np.sqrt(np.mean((coarse - fine) ** 2)) < 1e-4


class TestLorenz:
    """Test the Lorenz integrator."""

    @pytest.mark.unit
    def test_origin_is_equilibrium(self):
        x, y, z = gen_lorenz(20, x0=(0.0, 0.0, 0.0))
        for component in (x, y, z):
            np.testing.assert_array_equal(component, np.zeros(20))

    @pytest.mark.unit
    def test_step_refinement_short_horizon(self):
        coarse = np.stack(gen_lorenz(500, dt=0.01, subsample=1, transient_steps=0))
        fine = np.stack(gen_lorenz(500, dt=0.005, subsample=2, transient_steps=0))
        assert np.sqrt(np.mean((coarse - fine) ** 2)) < 1e-3

    @pytest.mark.unit
    def test_rejects_bad_start(self):
        with pytest.raises(InvalidInputError, match="x0"):
            gen_lorenz(10, x0=(1.0, 1.0))

    @pytest.mark.slow
    def test_bounded_attractor(self):
        x, y, z = gen_lorenz(10 ** 5, transient_steps=0)
        assert max(np.abs(x).max(), np.abs(y).max(), np.abs(z).max()) < 100.0


class TestNoise:
    """Test measurement noise injection."""

    @pytest.mark.unit
    def test_zero_std_is_identity(self, rng):
        series = rng.normal(size=20)
        noisy = add_noise(series, 0.0, seed=1)
        np.testing.assert_array_equal(noisy, series)
        assert noisy is not series

    @pytest.mark.unit
    def test_same_seed_same_noise(self, rng):
        series = rng.normal(size=20)
        np.testing.assert_array_equal(add_noise(series, 0.1, seed=9), add_noise(series, 0.1, seed=9))

    @pytest.mark.unit
    def test_levels_share_one_draw(self):
        zeros = np.zeros(100)
        np.testing.assert_allclose(add_noise(zeros, 0.2, seed=4), 2.0 * add_noise(zeros, 0.1, seed=4), rtol=1e-15)

    @pytest.mark.unit
    def test_negative_std_rejected(self):
        with pytest.raises(InvalidInputError):
            add_noise(np.zeros(3), -0.1, seed=0)

    @pytest.mark.slow
    def test_noise_std(self):
        noise = add_noise(np.zeros(10 ** 6), 0.05, seed=2)
        assert np.std(noise) == pytest.approx(0.05, rel=0.01)


class TestWindowing:
    """Test window cutting and fold plans."""

    @pytest.mark.unit
    def test_single_window(self):
        dataset = embed_windows([1.0, 2.0, 3.0], [0.0, 0.0, 7.0], lags=3, horizon=0)
        np.testing.assert_array_equal(dataset.windows, [[3.0, 2.0, 1.0]])
        np.testing.assert_array_equal(dataset.targets, [7.0])

    @pytest.mark.unit
    def test_identity_target_is_newest_sample(self, rng):
        x = rng.normal(size=30)
        dataset = embed_windows(x, x, lags=4, horizon=0)
        np.testing.assert_array_equal(dataset.targets, dataset.windows[:, 0])

    @pytest.mark.unit
    def test_windows_overlap_consistently(self, rng):
        x = rng.normal(size=25)
        windows = embed_windows(x, x, lags=5, horizon=2).windows
        np.testing.assert_array_equal(windows[1:, 1:], windows[:-1, :-1])

    @pytest.mark.unit
    def test_horizon_alignment(self):
        x = np.arange(10.0)
        dataset = embed_windows(x, x, lags=3, horizon=2)
        assert dataset.sample_count == 10 - 3 + 1 - 2
        np.testing.assert_array_equal(dataset.targets, dataset.windows[:, 0] + 2)

    @pytest.mark.unit
    def test_too_short(self):
        with pytest.raises(InsufficientDataError, match="too short"):
            embed_windows(np.zeros(3), np.zeros(3), lags=3, horizon=1)

    @pytest.mark.unit
    def test_length_mismatch(self):
        with pytest.raises(InvalidInputError, match="Expected length"):
            embed_windows(np.zeros(5), np.zeros(4), lags=2)

    @pytest.mark.unit
    def test_single_fold(self):
        plan = kfold_splits(1000, folds=1, test_len=300)
        assert plan.folds == [((0, 700), (700, 1000))]

    @pytest.mark.unit
    def test_test_blocks_are_disjoint_and_after_training(self):
        plan = kfold_splits(2000, folds=5, test_len=300, train_len=250)
        tests = plan.test_ranges
        assert sum(stop - start for start, stop in tests) == 1500
        for (a_start, a_stop), (b_start, b_stop) in zip(tests, tests[1:]):
            assert a_stop <= b_start
        for (train_start, train_stop), (test_start, _) in plan.folds:
            assert train_stop == test_start
            assert train_stop - train_start == 250

    @pytest.mark.unit
    def test_insufficient_data(self):
        with pytest.raises(InsufficientDataError):
            kfold_splits(1000, folds=5, test_len=300)

    @pytest.mark.unit
    def test_fold_datasets_do_not_leak(self):
        x = np.arange(1200.0)
        plan = kfold_splits(1200, folds=2, test_len=300, train_len=400)
        for fold in range(len(plan)):
            train, test = fold_datasets(x, x, plan, fold, lags=4, horizon=1)
            test_start, test_stop = plan.test_ranges[fold]
            assert train.targets.max() < test_start
            np.testing.assert_array_equal(test.targets, np.arange(test_start, test_stop, dtype=float))


class TestCsvAndNormalization:
    """Test CSV ingestion, normalization and export."""

    @pytest.mark.unit
    def test_headerless_column(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text("1.0,10\n2.0,20\n3.5,30\n")
        np.testing.assert_array_equal(load_csv(path, 1), [10.0, 20.0, 30.0])

    @pytest.mark.unit
    def test_header_detected(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text("year,spots\n1900,9.5\n1901,2.7\n")
        np.testing.assert_array_equal(load_csv(path, "spots"), [9.5, 2.7])
        np.testing.assert_array_equal(load_csv(path, 1), [9.5, 2.7])

    @pytest.mark.unit
    def test_non_numeric_row_reports_line(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text("value\n1.0\nabc\n3.0\n")
        with pytest.raises(CsvFormatError) as info:
            load_csv(path)
        assert info.value.line == 3

    @pytest.mark.unit
    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text("1.0\ninf\n")
        with pytest.raises(CsvFormatError, match="non-finite") as info:
            load_csv(path)
        assert info.value.line == 2

    @pytest.mark.unit
    def test_malformed_row(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text("1.0\n2.0\n3.0,4.0\n")
        with pytest.raises(CsvFormatError) as info:
            load_csv(path)
        assert info.value.line == 3

    @pytest.mark.unit
    def test_missing_header_column(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(CsvFormatError, match="not found"):
            load_csv(path, "c")

    @pytest.mark.unit
    def test_undecodable_byte_reports_line(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_bytes(b"1.0\n2.0\n3.\xff\n")
        with pytest.raises(CsvFormatError, match="UTF-8") as info:
            load_csv(path)
        assert info.value.line == 3

    @pytest.mark.unit
    def test_byte_order_mark_ignored(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_bytes(b"\xef\xbb\xbfspots\n4.0\n5.0\n")
        np.testing.assert_array_equal(load_csv(path, "spots"), [4.0, 5.0])

    @pytest.mark.unit
    def test_directory_is_not_a_file(self, tmp_path):
        with pytest.raises(InvalidInputError, match="cannot read"):
            load_csv(tmp_path)

    @pytest.mark.unit
    def test_single_value_normalizes_to_one(self):
        series, scale = normalize([1.0], (0, 1))
        np.testing.assert_array_equal(series, [1.0])
        assert scale == 1.0

    @pytest.mark.unit
    def test_norm_uses_training_slice(self):
        series, scale = normalize([3.0, 4.0, 10.0], (0, 2))
        assert scale == 5.0
        np.testing.assert_allclose(denormalize(series, scale), [3.0, 4.0, 10.0], rtol=1e-15)

    @pytest.mark.unit
    def test_max_abs_mode(self):
        _, scale = normalize([1.0, -4.0, 2.0], (0, 3), NormalizationMode.MAX_ABS)
        assert scale == 4.0

    @pytest.mark.unit
    def test_zero_slice_rejected(self):
        with pytest.raises(InvalidInputError, match="zero"):
            normalize([0.0, 0.0, 1.0], (0, 2))

    @pytest.mark.unit
    def test_export_then_load(self, tmp_path, rng):
        series = rng.normal(size=12)
        path = export_series_csv(series, tmp_path / "out" / "series.csv")
        assert path.read_text().splitlines()[0] == "index,value"
        np.testing.assert_allclose(load_csv(path, "value"), series, rtol=1e-15)


class TestSeriesSpec:
    """Test the series description and dispatch."""

    @pytest.mark.unit
    def test_same_spec_same_series(self):
        spec = SeriesSpec(kind=SeriesKind.STATIONARY_SYSTEM, length=200, seed=3)
        a = generate_series(spec)
        b = generate_series(spec)
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])

    @pytest.mark.unit
    def test_csv_kind_requires_source(self):
        with pytest.raises(ValidationError):
            SeriesSpec(kind=SeriesKind.CSV, length=100)

    @pytest.mark.unit
    def test_unknown_keys_rejected(self):
        with pytest.raises(ValidationError):
            SeriesSpec(kind=SeriesKind.STATIONARY_SYSTEM, lenght=100)

    @pytest.mark.unit
    def test_csv_series_truncated_to_length(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text("\n".join(str(v) for v in range(20)) + "\n")
        spec = SeriesSpec(kind=SeriesKind.CSV, length=10, csv=CsvSource(path=str(path)))
        x, z = generate_series(spec)
        np.testing.assert_array_equal(x, np.arange(10.0))
        np.testing.assert_array_equal(z, x)
