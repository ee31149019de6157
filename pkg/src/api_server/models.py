"""
API request and response models.

Defines Pydantic models for the REST API endpoints.
"""

from typing import List, Optional
from pydantic import BaseModel, Field, field_validator


class PredictRequest(BaseModel):
    """Request model for the predict endpoint."""

    windows: List[List[float]] = Field(
        ...,
        min_length=1,
        description="Input windows, each newest sample first and exactly L long",
        examples=[[[0.3, -0.1, 0.8]]]
    )


class PredictResponse(BaseModel):
    """Response model for the predict endpoint."""

    predictions: List[float] = Field(..., description="One estimate per window")
    horizon: int = Field(..., description="Steps ahead of the newest sample being estimated")


class ModesRequest(BaseModel):
    """Request model for the modes endpoint."""

    grid: List[float] = Field(
        ...,
        min_length=1,
        description="Abscissae at which every per-lag mode is sampled"
    )

    @field_validator("grid")
    @classmethod
    def validate_grid(cls, v):
        if any(value != value for value in v):
            raise ValueError("grid must not contain NaN")
        return v


class ModesResponse(BaseModel):
    """Per-lag mode values on the requested grid."""

    grid: List[float]
    functions: List[List[float]] = Field(..., description="L rows, one per lag, each as long as the grid")
    flatness: List[float] = Field(..., description="Variance of each mode inside the training support")
    support: List[float] = Field(..., description="5th and 95th percentile of the training input")


class HealthResponse(BaseModel):
    """Health check response."""

    status: str = Field(default="ok")
    version: str = Field(default="1.0.0")
    model_loaded: bool = Field(default=False)
    dims: Optional[int] = Field(None, description="Feature dimensions per sample (D)")
    lags: Optional[int] = Field(None, description="Window length (L)")
    sigma: Optional[float] = Field(None, description="Kernel size")


class ErrorResponse(BaseModel):
    """Error response model."""

    error: str = Field(..., description="Error message")
    code: Optional[str] = Field(None, description="Machine-readable error code")
    status_code: int = Field(..., description="HTTP status code")
