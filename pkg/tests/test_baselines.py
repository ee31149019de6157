"""
Tests for the reference filters.

This module tests:
- Linear Wiener fit on raw windows
- KLMS sequential updates and learning curve
- Exact KRLS against a dense regularized solve
- KRR/GPR batch solve, interpolation and conditioning errors
- Baseline model files and predict dispatch
"""

import numpy as np
import pytest

from src.baselines import (
    DictionaryModel,
    LinearWienerModel,
    gaussian_gram,
    gpr_fit,
    klms_fit,
    krls_fit,
    krr_fit,
    load_baseline,
    predict,
    predict_batch,
    save_baseline,
    training_mse,
    wiener_fit,
)
from src.config.constants import MethodName
from src.datagen import embed_windows
from src.exceptions import ConditioningError, InvalidInputError, ModelFormatError
from src.featuremap import FeatureMapSpec
from src.fwf import fit, predict_batch as fwf_predict_batch, save_model


class TestWienerFit:
    """Test the FIR Wiener filter."""

    @pytest.mark.unit
    def test_zero_target_gives_zero_weights(self, rng):
        x = rng.normal(size=300)
        model = wiener_fit(x, np.zeros(300), lags=4, horizon=0)
        np.testing.assert_array_equal(model.weights, np.zeros(4))

    @pytest.mark.unit
    def test_identity_target_picks_newest_tap(self, rng):
        x = rng.normal(size=5000)
        model = wiener_fit(x, x, lags=3, horizon=0)
        np.testing.assert_allclose(model.weights, [1.0, 0.0, 0.0], atol=1e-8)

    @pytest.mark.unit
    def test_autocorrelation_is_symmetric(self, rng):
        x = rng.normal(size=400)
        model = wiener_fit(x, np.roll(x, 1), lags=5, horizon=1)
        np.testing.assert_array_equal(model.autocorrelation, model.autocorrelation.T)
        assert model.effective_rank == 5
        assert model.variant == MethodName.WIENER.value

    @pytest.mark.unit
    def test_wrong_window_length(self, rng):
        model = wiener_fit(rng.normal(size=100), rng.normal(size=100), lags=3)
        with pytest.raises(InvalidInputError, match="Expected length 3"):
            predict(model, np.zeros(4))

    @pytest.mark.unit
    def test_single_and_batch_agree(self, rng):
        x = rng.normal(size=200)
        model = wiener_fit(x, np.tanh(x), lags=3, horizon=0)
        windows = rng.normal(size=(6, 3))
        batch = predict_batch(model, windows)
        for window, value in zip(windows, batch):
            assert predict(model, window) == pytest.approx(value, rel=1e-12, abs=1e-15)


class TestKlms:
    """Test kernel least mean squares."""

    @pytest.mark.unit
    def test_first_coefficient(self, rng):
        x = rng.normal(size=20)
        z = rng.normal(size=20)
        model = klms_fit(x, z, lags=2, horizon=0, sigma=1.0, step_size=0.3)
        assert model.coefficients[0] == pytest.approx(0.3 * z[1])
        assert model.learning_curve[0] == pytest.approx(z[1] ** 2)

    @pytest.mark.unit
    def test_dictionary_grows_by_one_per_sample(self, rng):
        x = rng.normal(size=50)
        model = klms_fit(x, x, lags=3, horizon=1, sigma=1.0, step_size=0.5)
        assert model.dictionary_size == 50 - 3 + 1 - 1
        assert model.variant == MethodName.KLMS.value

    @pytest.mark.unit
    def test_zero_step_predicts_zero(self, rng):
        x = rng.normal(size=60)
        model = klms_fit(x, np.sin(x), lags=2, horizon=0, sigma=1.0, step_size=0.0)
        np.testing.assert_array_equal(predict_batch(model, rng.normal(size=(10, 2))), np.zeros(10))

    @pytest.mark.unit
    def test_negative_step_rejected(self, rng):
        x = rng.normal(size=20)
        with pytest.raises(InvalidInputError, match="step_size"):
            klms_fit(x, x, lags=2, sigma=1.0, step_size=-0.1)

    @pytest.mark.unit
    def test_training_mse_without_dataset_uses_learning_curve(self, rng):
        x = rng.normal(size=40)
        model = klms_fit(x, x, lags=2, horizon=0, sigma=1.0, step_size=0.5)
        assert training_mse(model) == pytest.approx(np.mean(model.learning_curve))

    @pytest.mark.slow
    def test_learning_curve_decreases(self, rng):
        x = rng.normal(size=2001)
        z = np.tanh(x) + 0.5 * np.concatenate([[0.0], x[:-1]]) + 0.05 * rng.normal(size=2001)
        model = klms_fit(x, z, lags=2, horizon=0, sigma=1.0, step_size=0.5)
        blocks = model.learning_curve[:2000].reshape(20, 100).mean(axis=1)
        assert blocks[0] > blocks[-5:].mean()
        assert blocks[:5].mean() > blocks[-5:].mean()


class TestKrls:
    """Test exact kernel RLS."""

    @pytest.mark.unit
    def test_single_sample_interpolates(self):
        model = krls_fit([0.4, 0.9], [0.0, 2.5], lags=2, horizon=0, sigma=1.0, ridge=0.0)
        assert model.dictionary_size == 1
        assert predict(model, model.centers[0]) == pytest.approx(2.5)

    @pytest.mark.unit
    def test_matches_dense_solve(self, rng):
        x = rng.normal(size=52)
        z = np.sin(x) + 0.1 * rng.normal(size=52)
        model = krls_fit(x, z, lags=3, horizon=0, sigma=1.0, ridge=1e-2)
        dataset = embed_windows(x, z, 3, 0)
        gram = gaussian_gram(dataset.windows, dataset.windows, 1.0)
        expected = np.linalg.solve(gram + 1e-2 * np.eye(50), dataset.targets)
        np.testing.assert_allclose(model.coefficients, expected, rtol=1e-8, atol=1e-8)
        np.testing.assert_allclose(
            model.inverse_gram, np.linalg.inv(gram + 1e-2 * np.eye(50)), rtol=1e-7, atol=1e-8
        )

    @pytest.mark.unit
    def test_huge_ridge_shrinks_coefficients(self, rng):
        x = rng.normal(size=30)
        model = krls_fit(x, x, lags=2, horizon=0, sigma=1.0, ridge=1e12)
        assert np.max(np.abs(model.coefficients)) < 1e-10

    @pytest.mark.unit
    def test_repeated_window_without_ridge_is_skipped(self):
        x = np.ones(6)
        model = krls_fit(x, x, lags=2, horizon=0, sigma=1.0, ridge=0.0)
        assert model.dictionary_size == 1
        assert predict(model, [1.0, 1.0]) == pytest.approx(1.0)

    @pytest.mark.unit
    def test_repeats_keep_the_interpolant(self):
        x = np.array([0.1, 0.5, 0.1, 0.5, 0.1, 0.5])
        model = krls_fit(x, x, lags=2, horizon=0, sigma=1.0, ridge=0.0)
        assert model.dictionary_size == 2
        assert model.inverse_gram.shape == (2, 2)
        # newest sample first: [0.5, 0.1] ends on 0.5
        np.testing.assert_allclose(predict_batch(model, [[0.5, 0.1], [0.1, 0.5]]), [0.5, 0.1], rtol=1e-8)

    @pytest.mark.unit
    def test_negative_ridge_rejected(self):
        with pytest.raises(InvalidInputError, match="ridge"):
            krls_fit(np.zeros(5), np.zeros(5), lags=2, sigma=1.0, ridge=-1.0)


class TestKrr:
    """Test kernel ridge regression and the GPR label."""

    @pytest.mark.unit
    def test_single_point(self):
        model = krr_fit([[0.3, -0.2]], [1.7], sigma=1.0, lam=1e-10)
        assert predict(model, [0.3, -0.2]) == pytest.approx(1.7, rel=1e-8)

    @pytest.mark.unit
    def test_interpolates_distinct_points(self, rng):
        windows = rng.uniform(-2.0, 2.0, size=(10, 2))
        targets = rng.normal(size=10)
        model = krr_fit(windows, targets, sigma=1.0, lam=1e-12)
        residual = targets - predict_batch(model, windows)
        assert np.mean(residual ** 2) <= 1e-8 * np.var(targets)

    @pytest.mark.unit
    def test_duplicates_match_weighted_ridge(self):
        unique = np.array([[0.0], [0.7], [1.5]])
        targets = np.array([1.0, -0.5, 0.25])
        lam = 0.1
        doubled = np.vstack([unique, unique[:1]])
        model = krr_fit(doubled, np.append(targets, targets[0]), sigma=1.0, lam=lam)

        gram = gaussian_gram(unique, unique, 1.0)
        multiplicity = np.array([2.0, 1.0, 1.0])
        beta = np.linalg.solve(gram + np.diag(lam / multiplicity), targets)
        grid = np.linspace(-1.0, 2.0, 7)[:, None]
        expected = gaussian_gram(grid, unique, 1.0) @ beta
        np.testing.assert_allclose(predict_batch(model, grid), expected, rtol=1e-10, atol=1e-12)

    @pytest.mark.unit
    def test_rejects_non_positive_lambda(self):
        with pytest.raises(InvalidInputError, match="lambda"):
            krr_fit([[0.0]], [1.0], sigma=1.0, lam=0.0)

    @pytest.mark.unit
    def test_conditioning_error_suggests_larger_lambda(self):
        windows = np.zeros((5, 2))
        with pytest.raises(ConditioningError) as info:
            krr_fit(windows, np.arange(5.0), sigma=1.0, lam=1e-300)
        assert info.value.suggested_lambda > 1e-300

    @pytest.mark.unit
    def test_gpr_is_krr_with_noise_variance(self, rng):
        windows = rng.normal(size=(15, 3))
        targets = rng.normal(size=15)
        gpr = gpr_fit(windows, targets, sigma=0.8, noise_variance=0.05)
        krr = krr_fit(windows, targets, sigma=0.8, lam=0.05)
        assert gpr.variant == MethodName.GPR.value
        np.testing.assert_array_equal(gpr.coefficients, krr.coefficients)

    @pytest.mark.unit
    def test_parallel_gram_matches_serial(self, rng):
        a = rng.normal(size=(40, 3))
        b = rng.normal(size=(12, 3))
        np.testing.assert_allclose(gaussian_gram(a, b, 1.1, n_jobs=2), gaussian_gram(a, b, 1.1), rtol=1e-14)

    @pytest.mark.unit
    def test_empty_dictionary_predicts_zero(self):
        model = DictionaryModel(
            variant=MethodName.KRR, centers=np.zeros((0, 2)), coefficients=np.zeros(0), sigma=1.0
        )
        np.testing.assert_array_equal(predict_batch(model, np.ones((3, 2))), np.zeros(3))


class TestBaselineStorage:
    """Test baseline model files."""

    @pytest.mark.unit
    def test_wiener_round_trip(self, tmp_path, rng):
        x = rng.normal(size=100)
        model = wiener_fit(x, np.tanh(x), lags=3, horizon=1)
        loaded = load_baseline(save_baseline(model, tmp_path / "wiener.fwfm"))
        assert isinstance(loaded, LinearWienerModel)
        np.testing.assert_array_equal(loaded.weights, model.weights)
        assert loaded.horizon == 1

    @pytest.mark.unit
    def test_krls_round_trip_keeps_state(self, tmp_path, rng):
        x = rng.normal(size=30)
        model = krls_fit(x, x, lags=2, horizon=0, sigma=0.9, ridge=1e-3)
        loaded = load_baseline(save_baseline(model, tmp_path / "krls.fwfm"))
        assert loaded.variant == MethodName.KRLS.value
        assert loaded.ridge == 1e-3
        assert loaded.step_size is None
        np.testing.assert_array_equal(loaded.inverse_gram, model.inverse_gram)
        np.testing.assert_array_equal(loaded.coefficients, model.coefficients)

    @pytest.mark.unit
    def test_fwf_file_is_refused(self, tmp_path, fitted_model):
        path = save_model(fitted_model, tmp_path / "fwf.fwfm")
        with pytest.raises(ModelFormatError, match="FWF"):
            load_baseline(path)

    @pytest.mark.unit
    def test_missing_file(self, tmp_path):
        with pytest.raises(ModelFormatError):
            load_baseline(tmp_path / "absent.fwfm")

    @pytest.mark.unit
    def test_unknown_model_type(self):
        with pytest.raises(TypeError):
            predict(object(), [0.0])


class TestLinearSanity:
    """FWF should not lose materially to the linear filter on a linear task."""

    @pytest.mark.slow
    def test_fwf_close_to_wiener_on_linear_task(self, rng):
        n = 6000
        x = rng.normal(size=n)
        taps = np.array([0.8, -0.4, 0.2])
        z = np.convolve(x, taps)[:n] + 0.1 * rng.normal(size=n)
        split = 4000

        wiener = wiener_fit(x[:split], z[:split], lags=3, horizon=0)
        fwf = fit(x[:split], z[:split], lags=3, spec=FeatureMapSpec(sigma=3.0, dims=10), horizon=0)

        test = embed_windows(x[split:], z[split:], 3, 0)
        wiener_mse = np.mean((test.targets - predict_batch(wiener, test.windows)) ** 2)
        fwf_mse = np.mean((test.targets - fwf_predict_batch(fwf, test.windows)) ** 2)
        assert fwf_mse <= 1.05 * wiener_mse
