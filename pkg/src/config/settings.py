"""
Toolkit settings loaded from environment variables and an optional .env file.

Values here are fallbacks: CLI flags and experiment files take precedence.
"""

from typing import Optional
from pathlib import Path
from pydantic import Field, validator
from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import dotenv_values

from .constants import (
    DEFAULT_DIMS,
    DEFAULT_HORIZON,
    DEFAULT_LAGS,
    DEFAULT_PINV_EPSILON,
    DEFAULT_SEED,
    DEFAULT_SIGMA,
    DEFAULT_TIMING_WARMUP,
    MIN_TIMING_REPEATS,
)

# .env at the repository root; shell variables win over it
env_path = Path(__file__).parent.parent.parent / '.env'

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseSettings):
    """Filter defaults, bench execution and serving options."""

    model_config = SettingsConfigDict(case_sensitive=False, extra="ignore")

    # Filter defaults
    default_sigma: float = Field(default=DEFAULT_SIGMA, gt=0.0, description="Kernel size")
    default_dims: int = Field(
        default=DEFAULT_DIMS,
        ge=1,
        le=2000,
        description="Retained feature dimensions per sample (D)"
    )
    default_lags: int = Field(default=DEFAULT_LAGS, ge=1, description="Window length (L)")
    default_epsilon: float = Field(
        default=DEFAULT_PINV_EPSILON,
        gt=0.0,
        lt=1.0,
        description="Relative eigenvalue cutoff"
    )
    default_horizon: int = Field(default=DEFAULT_HORIZON, ge=0, description="Prediction horizon")
    default_seed: int = Field(default=DEFAULT_SEED, ge=0, description="Seed for generated series")

    # Bench
    output_dir: str = Field(default="output", description="Directory for reports and figure data")
    n_jobs: int = Field(default=1, description="joblib workers for independent bench cells")
    timing_repeats: int = Field(default=MIN_TIMING_REPEATS, ge=MIN_TIMING_REPEATS)
    timing_warmup: int = Field(default=DEFAULT_TIMING_WARMUP, ge=0)

    # Serving
    model_path: Optional[str] = Field(None, description="Model file loaded by the HTTP server")
    host: str = Field(default="0.0.0.0")
    port: int = Field(default=8000, ge=1, le=65535)

    app_env: str = Field(default="development")
    log_level: str = Field(default="INFO")
    log_file: Optional[str] = Field(None, description="Optional rotating log file")

    @validator("log_level")
    def validate_log_level(cls, v):
        v_upper = v.upper()
        if v_upper not in LOG_LEVELS:
            raise ValueError(f"log_level must be one of {list(LOG_LEVELS)}")
        return v_upper

    @validator("n_jobs")
    def validate_n_jobs(cls, v):
        """joblib takes a positive worker count or -1 for every core."""
        if v == 0 or v < -1:
            raise ValueError("n_jobs must be a positive integer or -1")
        return v

    @property
    def is_development(self) -> bool:
        return self.app_env.lower() in ("development", "dev")

    @property
    def is_production(self) -> bool:
        return self.app_env.lower() in ("production", "prod")

    @property
    def has_model(self) -> bool:
        return self.model_path is not None


def _load() -> Settings:
    # Only keys the .env actually sets; pydantic-settings lets the shell override them
    env_file = env_path if env_path.exists() and dotenv_values(env_path) else None
    return Settings(_env_file=env_file, _env_file_encoding="utf-8")


# Global settings instance
settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Return the process-wide settings, loading them on first use."""
    global settings
    if settings is None:
        settings = _load()
    return settings


def reload_settings() -> Settings:
    """Re-read the environment and .env, replacing the cached instance."""
    global settings
    settings = _load()
    return settings
