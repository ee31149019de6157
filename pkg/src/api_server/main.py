"""
FastAPI server for a fitted Functional Wiener Filter.

The model file named by ``MODEL_PATH`` is loaded once at startup; without
one the model endpoints answer 503.
"""

import logging
from typing import Optional
from contextlib import asynccontextmanager

import numpy as np
from fastapi import FastAPI, HTTPException, Request, status
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .models import (
    ErrorResponse,
    HealthResponse,
    ModesRequest,
    ModesResponse,
    PredictRequest,
    PredictResponse,
)
from ..config import configure_from_settings, get_settings
from ..config.constants import ERROR_LENGTH_MISMATCH
from ..exceptions import FwfError, InvalidInputError
from ..fwf import FwfModel, extract_modes, load_model, predict_batch

logger = logging.getLogger(__name__)

# Loaded in lifespan
model: Optional[FwfModel] = None


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Lifespan context manager for startup and shutdown."""
    global model

    settings = get_settings()
    configure_from_settings(settings)
    logger.info("Starting API server...")

    if not settings.model_path:
        logger.warning("MODEL_PATH not set - predict and modes will return 503")
    else:
        model = load_model(settings.model_path)
        logger.info(
            f"Loaded model {settings.model_path}: D={model.dims}, L={model.lags}, "
            f"sigma={model.sigma}, horizon={model.horizon}"
        )

    yield

    logger.info("Shutting down API server...")
    model = None


app = FastAPI(
    title="FWF Server",
    description="Low-latency evaluation of a fitted Functional Wiener Filter",
    version="1.0.0",
    lifespan=lifespan
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


def _require_model() -> FwfModel:
    if model is None:
        raise HTTPException(
            status_code=status.HTTP_503_SERVICE_UNAVAILABLE,
            detail="No model loaded. Set MODEL_PATH and restart."
        )
    return model


@app.get("/health", response_model=HealthResponse, tags=["Health"])
async def health_check():
    """Health check endpoint."""
    if model is None:
        return HealthResponse(model_loaded=False)
    return HealthResponse(model_loaded=True, dims=model.dims, lags=model.lags, sigma=model.sigma)


@app.post("/predict", response_model=PredictResponse, tags=["Filter"])
async def predict_windows(request: PredictRequest):
    """
    Evaluate the loaded filter on a batch of windows.

    Raises:
        HTTPException: 503 without a model; FwfError maps to 422
    """
    fitted = _require_model()
    for window in request.windows:
        if len(window) != fitted.lags:
            raise InvalidInputError(ERROR_LENGTH_MISMATCH.format(expected=fitted.lags, actual=len(window)))

    predictions = predict_batch(fitted, np.asarray(request.windows, dtype=float))
    logger.debug(f"Predicted {len(request.windows)} windows")
    return PredictResponse(predictions=predictions.tolist(), horizon=fitted.horizon)


@app.post("/modes", response_model=ModesResponse, tags=["Filter"])
async def mode_functions(request: ModesRequest):
    """Sample every per-lag mode of the loaded filter on the requested grid."""
    fitted = _require_model()
    modes = extract_modes(fitted, np.asarray(request.grid, dtype=float))
    return ModesResponse(
        grid=modes.grid.tolist(),
        functions=modes.functions.tolist(),
        flatness=modes.flatness.tolist(),
        support=list(modes.support),
    )


@app.exception_handler(FwfError)
async def fwf_exception_handler(request: Request, exc: FwfError):
    """Library errors keep their code; bad input is 422, anything else 400."""
    status_code = (
        status.HTTP_422_UNPROCESSABLE_ENTITY
        if isinstance(exc, InvalidInputError)
        else status.HTTP_400_BAD_REQUEST
    )
    logger.warning(f"{request.url.path} rejected: {exc.message}")
    return JSONResponse(
        status_code=status_code,
        content=ErrorResponse(error=exc.message, code=exc.code, status_code=status_code).model_dump()
    )


@app.exception_handler(HTTPException)
async def http_exception_handler(request, exc):
    """Custom HTTP exception handler."""
    return JSONResponse(
        status_code=exc.status_code,
        content=ErrorResponse(
            error=exc.detail,
            status_code=exc.status_code
        ).model_dump()
    )


if __name__ == "__main__":
    import uvicorn

    settings = get_settings()
    uvicorn.run(
        "src.api_server.main:app",
        host=settings.host,
        port=settings.port,
        reload=settings.is_development,
        log_level=settings.log_level.lower()
    )
