"""
Pytest configuration and shared fixtures for the FWF toolkit tests.
"""
import pytest

from src.datagen import gen_stationary_system, stream
from src.featuremap import FeatureMapSpec
from src.fwf import fit


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """
    Keep tests independent of a developer's .env and of each other.

    Points the settings loader at an empty .env and drops the cached instance.
    """
    empty_env = tmp_path / ".env"
    empty_env.write_text("")
    monkeypatch.setattr("src.config.settings.env_path", empty_env)
    monkeypatch.delenv("MODEL_PATH", raising=False)
    monkeypatch.setattr("src.config.settings.settings", None)
    yield


@pytest.fixture
def rng():
    """Seeded generator for test data."""
    return stream(12345, "tests")


@pytest.fixture
def small_spec():
    return FeatureMapSpec(sigma=1.0, dims=4)


@pytest.fixture
def stationary_series():
    """(x, d) from the five-lag nonlinear system, 1200 samples."""
    return gen_stationary_system(1200, seed=7)


@pytest.fixture
def fitted_model(stationary_series):
    """Small FWF fitted on the stationary system (L=5, D=5, sigma=1.5)."""
    x, d = stationary_series
    return fit(x, d, lags=5, spec=FeatureMapSpec(sigma=1.5, dims=5), horizon=0)
