"""
Data models for generated and loaded series
"""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union
import logging

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config.constants import (
    DEFAULT_TEST_LEN,
    MACKEY_GLASS_HISTORY,
    TRANSIENT_STEPS,
    NoiseStdMode,
    NormalizationMode,
    SeriesKind,
)

logger = logging.getLogger(__name__)


class StationaryParams(BaseModel):
    """Synthetic memory-depth-5 system driven by Gaussian input."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    input_std_mode: NoiseStdMode = Field(
        default=NoiseStdMode.VARIANCE,
        description="Read N(0, pi) as variance pi (default) or std pi"
    )
    zero_input: bool = Field(default=False, description="Force X = 0 (debug path)")


class MackeyGlassParams(BaseModel):
    """Delay differential equation dx/dt = beta x(t-delay)/(1+x(t-delay)^power) - gamma x(t)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    beta: float = Field(default=0.2, gt=0.0)
    gamma: float = Field(default=0.1, gt=0.0)
    power: float = Field(default=10.0, gt=0.0)
    delay: float = Field(default=30.0, gt=0.0)
    dt: float = Field(default=0.1, gt=0.0)
    subsample: int = Field(default=6, ge=1)
    history: Optional[float] = Field(
        default=None,
        description=f"Constant history level; None draws one from the seed (or {MACKEY_GLASS_HISTORY} without random history)"
    )
    random_history: bool = Field(default=False, description="Draw the history level from the series seed")
    transient_steps: int = Field(default=TRANSIENT_STEPS, ge=0)


class LorenzParams(BaseModel):
    """Lorenz system integrated with fourth-order Runge-Kutta."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    sigma: float = Field(default=10.0, gt=0.0)
    rho: float = Field(default=28.0, gt=0.0)
    beta: float = Field(default=8.0 / 3.0, gt=0.0)
    dt: float = Field(default=0.01, gt=0.0)
    subsample: int = Field(default=1, ge=1)
    x0: Tuple[float, float, float] = (1.0, 1.0, 1.0)
    transient_steps: int = Field(default=TRANSIENT_STEPS, ge=0)


class CsvSource(BaseModel):
    """One numeric column of a local CSV file."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    path: str
    column: Union[int, str] = 0


class SeriesSpec(BaseModel):
    """
    Everything needed to reproduce a series bit-for-bit.

    Only the parameter block matching ``kind`` is used.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: SeriesKind
    length: int = Field(default=5000, gt=5)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    normalization: NormalizationMode = Field(
        default=NormalizationMode.NONE,
        description="Per-fold scaling computed on the training slice"
    )
    stationary: StationaryParams = Field(default_factory=StationaryParams)
    mackey_glass: MackeyGlassParams = Field(default_factory=MackeyGlassParams)
    lorenz: LorenzParams = Field(default_factory=LorenzParams)
    csv: Optional[CsvSource] = None

    @model_validator(mode="after")
    def validate_csv(self):
        if self.kind == SeriesKind.CSV and self.csv is None:
            raise ValueError("kind 'csv' requires a csv source block")
        return self


@dataclass(frozen=True)
class FoldPlan:
    """
    Contiguous train/test index ranges, half-open (start, stop).

    Every fold trains on samples strictly before its test block.
    """

    folds: List[Tuple[Tuple[int, int], Tuple[int, int]]] = field(default_factory=list)
    test_len: int = DEFAULT_TEST_LEN

    def __len__(self) -> int:
        return len(self.folds)

    @property
    def test_ranges(self) -> List[Tuple[int, int]]:
        return [test for _, test in self.folds]

    @property
    def train_ranges(self) -> List[Tuple[int, int]]:
        return [train for train, _ in self.folds]
