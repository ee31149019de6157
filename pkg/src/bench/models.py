"""
Experiment configuration and report models.

Experiment files are JSON validated with ``extra="forbid"`` at every level,
so a misspelled hyperparameter is an error instead of a silent default.
"""
from dataclasses import dataclass, field
from itertools import product
from typing import TYPE_CHECKING, Any, Dict, List, Optional
import hashlib
import logging

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..config.constants import (
    DEFAULT_DIMS,
    DEFAULT_FOLDS,
    DEFAULT_HORIZON,
    DEFAULT_LAGS,
    DEFAULT_NOISE_LEVELS,
    DEFAULT_PINV_EPSILON,
    DEFAULT_SAMPLE_SIZES,
    DEFAULT_SIGMA,
    DEFAULT_TEST_LEN,
    DEFAULT_TIMING_WARMUP,
    MIN_TIMING_REPEATS,
    MethodName,
)
from ..datagen.models import SeriesSpec

if TYPE_CHECKING:
    from ..config.settings import Settings

logger = logging.getLogger(__name__)

_STRICT = ConfigDict(extra="forbid", frozen=True)


def _non_empty(values: List, name: str) -> List:
    if not values:
        raise ValueError(f"{name} grid must not be empty")
    return values


class MethodSpec(BaseModel):
    """One method and its hyperparameter grids; cells cover their product."""

    model_config = _STRICT

    name: MethodName
    sigmas: List[float] = Field(default_factory=lambda: [DEFAULT_SIGMA])
    dims: List[int] = Field(default_factory=lambda: [DEFAULT_DIMS])
    lags: List[int] = Field(default_factory=lambda: [DEFAULT_LAGS])
    epsilon: float = Field(default=DEFAULT_PINV_EPSILON, gt=0.0, lt=1.0)
    step_sizes: List[float] = Field(default_factory=lambda: [0.5], description="KLMS learning rates")
    ridges: List[float] = Field(
        default_factory=lambda: [1e-3],
        description="KRLS ridge, KRR lambda or GPR noise variance"
    )

    @field_validator("sigmas", "dims", "lags", "step_sizes", "ridges")
    @classmethod
    def validate_grid(cls, v, info):
        return _non_empty(v, info.field_name)

    @field_validator("sigmas")
    @classmethod
    def validate_sigmas(cls, v):
        if any(sigma <= 0 for sigma in v):
            raise ValueError("sigmas must be positive")
        return v

    @field_validator("dims", "lags")
    @classmethod
    def validate_positive(cls, v, info):
        if any(value < 1 for value in v):
            raise ValueError(f"{info.field_name} must be positive")
        return v

    @model_validator(mode="after")
    def validate_regularizers(self):
        if self.name in (MethodName.KRR, MethodName.GPR) and any(r <= 0 for r in self.ridges):
            raise ValueError(f"{self.name.value} needs positive ridges")
        if any(r < 0 for r in self.ridges) or any(s < 0 for s in self.step_sizes):
            raise ValueError("ridges and step_sizes must be non-negative")
        return self

    def configurations(self) -> List[Dict[str, Any]]:
        """Hyperparameter combinations this method actually uses, in grid order."""
        if self.name == MethodName.FWF:
            grid = product(self.sigmas, self.dims, self.lags)
            return [{"sigma": s, "dims": d, "lags": l, "epsilon": self.epsilon} for s, d, l in grid]
        if self.name == MethodName.WIENER:
            return [{"lags": l, "epsilon": self.epsilon} for l in self.lags]
        if self.name == MethodName.KLMS:
            grid = product(self.sigmas, self.lags, self.step_sizes)
            return [{"sigma": s, "lags": l, "step_size": eta} for s, l, eta in grid]
        grid = product(self.sigmas, self.lags, self.ridges)
        return [{"sigma": s, "lags": l, "ridge": r} for s, l, r in grid]


class MmseSweepSpec(BaseModel):
    """Training, theoretical and test MSE of the FWF over a D x L grid."""

    model_config = _STRICT

    sigma: float = Field(gt=0.0)
    dims: List[int] = Field(min_length=1)
    lags: List[int] = Field(min_length=1)
    sample_size: int = Field(gt=0)
    epsilon: float = Field(default=DEFAULT_PINV_EPSILON, gt=0.0, lt=1.0)


class DimsSweepSpec(BaseModel):
    """Training and test MSE of the FWF as D grows at fixed sigma and L."""

    model_config = _STRICT

    sigma: float = Field(gt=0.0)
    lags: int = Field(ge=1)
    dims: List[int] = Field(min_length=1)
    sample_size: int = Field(gt=0)
    epsilon: float = Field(default=DEFAULT_PINV_EPSILON, gt=0.0, lt=1.0)


class ModeExtractionSpec(BaseModel):
    """Per-lag modes of one FWF fit sampled on a regular grid."""

    model_config = _STRICT

    sigma: float = Field(gt=0.0)
    dims: int = Field(ge=1)
    lags: int = Field(ge=1)
    sample_size: int = Field(gt=0)
    grid_min: float = -3.0
    grid_max: float = 3.0
    grid_points: int = Field(default=201, ge=2)
    epsilon: float = Field(default=DEFAULT_PINV_EPSILON, gt=0.0, lt=1.0)

    @model_validator(mode="after")
    def validate_range(self):
        if not self.grid_min < self.grid_max:
            raise ValueError("grid_min must be below grid_max")
        return self


class PredictionsSpec(BaseModel):
    """Test-set predictions of each method's selected configuration."""

    model_config = _STRICT

    fold: int = Field(default=0, ge=0)


class TimingSpec(BaseModel):
    """Latency probes of each method's selected configuration."""

    model_config = _STRICT

    repeats: int = Field(default=MIN_TIMING_REPEATS, ge=MIN_TIMING_REPEATS)
    warmup: int = Field(default=DEFAULT_TIMING_WARMUP, ge=0)


class ExperimentSpec(BaseModel):
    """A complete, reproducible benchmark run."""

    model_config = _STRICT

    task: SeriesSpec
    methods: List[MethodSpec] = Field(min_length=1)
    sample_sizes: List[int] = Field(default_factory=lambda: list(DEFAULT_SAMPLE_SIZES), min_length=1)
    folds: int = Field(default=DEFAULT_FOLDS, ge=1)
    test_len: int = Field(default=DEFAULT_TEST_LEN, ge=1)
    horizon: int = Field(default=DEFAULT_HORIZON, ge=0)
    noise_levels: List[float] = Field(default_factory=lambda: list(DEFAULT_NOISE_LEVELS), min_length=1)
    noise_seed: Optional[int] = Field(default=None, ge=0, description="Defaults to the task seed")
    output_dir: Optional[str] = Field(default=None, description="None uses the OUTPUT_DIR setting")
    n_jobs: Optional[int] = Field(default=None, description="joblib workers for independent cells; None uses N_JOBS")

    mmse_sweep: Optional[MmseSweepSpec] = None
    dims_sweep: Optional[DimsSweepSpec] = None
    mode_extraction: Optional[ModeExtractionSpec] = None
    predictions: Optional[PredictionsSpec] = None
    timing: Optional[TimingSpec] = None

    @field_validator("sample_sizes")
    @classmethod
    def validate_sample_sizes(cls, v):
        if any(n < 1 for n in v):
            raise ValueError("sample sizes must be positive")
        return v

    @field_validator("noise_levels")
    @classmethod
    def validate_noise_levels(cls, v):
        if any(std < 0 for std in v):
            raise ValueError("noise levels must be non-negative")
        return v

    @field_validator("n_jobs")
    @classmethod
    def validate_n_jobs(cls, v):
        if v is None:
            return v
        if v == 0 or v < -1:
            raise ValueError("n_jobs must be a positive integer or -1")
        return v

    @model_validator(mode="after")
    def validate_unique_methods(self):
        names = [method.name for method in self.methods]
        if len(set(names)) != len(names):
            raise ValueError("each method may appear only once; put alternatives in its grids")
        return self

    @property
    def effective_noise_seed(self) -> int:
        return self.task.seed if self.noise_seed is None else self.noise_seed

    def with_settings(self, settings: "Settings") -> "ExperimentSpec":
        """
        Copy with the run options the file leaves unset taken from the settings.

        ``output_dir`` and ``n_jobs`` fall back when they are None; the task
        seed falls back to ``default_seed`` when the task block omits it.
        """
        update: Dict[str, Any] = {}
        if self.output_dir is None:
            update["output_dir"] = settings.output_dir
        if self.n_jobs is None:
            update["n_jobs"] = settings.n_jobs
        if "seed" not in self.task.model_fields_set:
            update["task"] = self.task.model_copy(update={"seed": settings.default_seed})
        return self.model_copy(update=update) if update else self

    def spec_hash(self) -> str:
        """sha256 of the canonical JSON form; output_dir and n_jobs do not change results."""
        canonical = self.model_dump_json(exclude={"output_dir", "n_jobs"})
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


CELL_COLUMNS = [
    "method", "config_id", "N", "noise_std", "fold", "sigma", "dims", "lags",
    "step_size", "ridge", "epsilon", "train_mse", "test_mse", "theoretical_mmse",
    "effective_rank", "status", "error", "seed", "spec_hash",
]
SUMMARY_COLUMNS = [
    "method", "config_id", "N", "noise_std", "sigma", "dims", "lags", "step_size", "ridge",
    "epsilon", "train_mse_mean", "test_mse_mean", "test_mse_var", "theoretical_mmse_mean",
    "folds_ok", "folds_failed",
]
TIMING_COLUMNS = [
    "method", "config_id", "N", "noise_std", "fold", "fit_seconds", "eval_seconds_per_sample",
]
PROBE_COLUMNS = [
    "method", "N", "lags", "dims", "median_ns", "iqr_ns", "repeats", "feature_dimension",
]
MMSE_SWEEP_COLUMNS = ["D", "L", "train_mse", "theoretical_mse", "test_mse", "effective_rank"]
DIMS_SWEEP_COLUMNS = ["D", "train_mse", "test_mse"]
MODE_COLUMNS = ["tau", "x", "f"]
PREDICTION_COLUMNS = ["method", "N", "index", "target", "prediction"]


def empty_frame(columns: List[str]) -> pd.DataFrame:
    return pd.DataFrame({column: [] for column in columns})


@dataclass
class ExperimentReport:
    """
    Everything one run produced.

    ``cells`` has one row per (method, configuration, N, noise, fold);
    ``summary`` aggregates folds; ``selected`` keeps the best configuration
    per (method, N, noise). Section tables are None when not configured.
    Wall-clock tables (``timings``, ``probes``) never enter report.json.
    """

    spec: ExperimentSpec
    spec_hash: str
    cells: pd.DataFrame = field(default_factory=lambda: empty_frame(CELL_COLUMNS))
    summary: pd.DataFrame = field(default_factory=lambda: empty_frame(SUMMARY_COLUMNS))
    selected: pd.DataFrame = field(default_factory=lambda: empty_frame(SUMMARY_COLUMNS))
    failed_methods: List[str] = field(default_factory=list)
    mmse_sweep: Optional[pd.DataFrame] = None
    dims_sweep: Optional[pd.DataFrame] = None
    modes: Optional[pd.DataFrame] = None
    predictions: Optional[pd.DataFrame] = None
    timings: pd.DataFrame = field(default_factory=lambda: empty_frame(TIMING_COLUMNS))
    probes: Optional[pd.DataFrame] = None
