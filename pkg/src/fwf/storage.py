"""
Self-describing binary envelope for fitted models.

Layout (all little-endian):

    magic      4 bytes  b"FWFM"
    version    uint16
    header_len uint32
    header     UTF-8 JSON (variant, integer fields, array names and shapes)
    arrays     float64 payloads in header order
    crc32      uint32 over everything before it

Float scalars travel inside the ``scalars`` array so every numeric field
round-trips bit for bit. The same envelope holds baseline models under a
different variant tag.
"""
from pathlib import Path
from typing import Dict, List, Tuple, Union
import logging
import struct
import zlib

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..config.constants import MODEL_FORMAT_VERSION, MODEL_MAGIC
from ..exceptions import InvalidInputError, ModelFormatError
from ..featuremap.models import FeatureMapSpec
from .models import FwfModel, ModeSet

logger = logging.getLogger(__name__)

FWF_VARIANT = "fwf"

_PREFIX = struct.Struct("<4sHI")
_CRC = struct.Struct("<I")


class ArrayEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    shape: List[int]


class EnvelopeHeader(BaseModel):
    """JSON header of the model envelope."""

    model_config = ConfigDict(extra="forbid")

    variant: str
    integers: Dict[str, int] = Field(default_factory=dict)
    scalar_names: List[str] = Field(default_factory=list)
    arrays: List[ArrayEntry] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)


def encode_envelope(
    variant: str,
    integers: Dict[str, int],
    scalars: Dict[str, float],
    arrays: Dict[str, np.ndarray],
    warnings: Tuple[str, ...] = (),
) -> bytes:
    """Serialize one model into envelope bytes."""
    payload = {"scalars": np.array(list(scalars.values()), dtype="<f8")}
    for name, values in arrays.items():
        if name == "scalars":
            raise InvalidInputError("'scalars' is a reserved array name")
        payload[name] = np.ascontiguousarray(values, dtype="<f8")

    header = EnvelopeHeader(
        variant=variant,
        integers={name: int(value) for name, value in integers.items()},
        scalar_names=list(scalars),
        arrays=[ArrayEntry(name=name, shape=list(values.shape)) for name, values in payload.items()],
        warnings=list(warnings),
    )
    header_bytes = header.model_dump_json().encode("utf-8")
    body = _PREFIX.pack(MODEL_MAGIC, MODEL_FORMAT_VERSION, len(header_bytes)) + header_bytes
    body += b"".join(values.tobytes() for values in payload.values())
    return body + _CRC.pack(zlib.crc32(body))


def decode_envelope(data: bytes) -> Tuple[EnvelopeHeader, Dict[str, float], Dict[str, np.ndarray]]:
    """
    Parse envelope bytes.

    Returns:
        Tuple of (header, scalars by name, arrays by name)

    Raises:
        ModelFormatError: Truncated, corrupt or unsupported data
    """
    if len(data) < _PREFIX.size + _CRC.size:
        raise ModelFormatError(f"model file truncated ({len(data)} bytes)")
    magic, version, header_len = _PREFIX.unpack_from(data)
    if magic != MODEL_MAGIC:
        raise ModelFormatError(f"not a model file (magic {magic!r})")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model format version {version}, expected {MODEL_FORMAT_VERSION}")

    header_end = _PREFIX.size + header_len
    if len(data) < header_end + _CRC.size:
        raise ModelFormatError("model file truncated inside the header")
    try:
        header = EnvelopeHeader.model_validate_json(data[_PREFIX.size:header_end])
    except ValidationError as e:
        raise ModelFormatError(f"invalid model header: {e.errors()[0]['msg']}")

    if any(dim < 0 for entry in header.arrays for dim in entry.shape):
        raise ModelFormatError("negative array dimension in header")
    sizes = [int(np.prod(entry.shape, dtype=np.int64)) for entry in header.arrays]
    expected = header_end + 8 * sum(sizes) + _CRC.size
    if len(data) != expected:
        raise ModelFormatError(f"model file has {len(data)} bytes, header describes {expected}")
    (stored_crc,) = _CRC.unpack_from(data, expected - _CRC.size)
    if stored_crc != zlib.crc32(data[:expected - _CRC.size]):
        raise ModelFormatError("model file checksum mismatch")

    arrays: Dict[str, np.ndarray] = {}
    offset = header_end
    for entry, size in zip(header.arrays, sizes):
        values = np.frombuffer(data, dtype="<f8", count=size, offset=offset).reshape(entry.shape)
        arrays[entry.name] = values.astype(float)
        offset += 8 * size

    packed = arrays.pop("scalars", np.zeros(0))
    if packed.size != len(header.scalar_names):
        raise ModelFormatError("scalar block does not match the header")
    scalars = {name: float(value) for name, value in zip(header.scalar_names, packed)}
    return header, scalars, arrays


def write_envelope(path: Union[str, Path], data: bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    return path


def read_envelope(path: Union[str, Path]) -> Tuple[EnvelopeHeader, Dict[str, float], Dict[str, np.ndarray]]:
    path = Path(path)
    try:
        data = path.read_bytes()
    except FileNotFoundError:
        raise ModelFormatError(f"model file not found: {path}")
    return decode_envelope(data)


def _require(mapping: Dict, names, what: str) -> None:
    missing = [name for name in names if name not in mapping]
    if missing:
        raise ModelFormatError(f"model file lacks {what}: {', '.join(missing)}")


def encode_model(model: FwfModel) -> bytes:
    return encode_envelope(
        FWF_VARIANT,
        integers={
            "dims": model.spec.dims,
            "lags": model.lags,
            "horizon": model.horizon,
            "effective_rank": model.effective_rank,
            "sample_count": model.sample_count,
        },
        scalars={
            "sigma": model.spec.sigma,
            "pinv_cutoff": model.pinv_cutoff,
            "theoretical_mmse": model.theoretical_mmse,
            "desired_power": model.desired_power,
            "ridge": model.ridge,
            "support_low": model.support[0],
            "support_high": model.support[1],
        },
        arrays={"weights": model.weights, "rho": model.rho, "eigenvalues": model.eigenvalues},
        warnings=model.warnings,
    )


def decode_model(data: bytes) -> FwfModel:
    header, scalars, arrays = decode_envelope(data)
    if header.variant != FWF_VARIANT:
        raise ModelFormatError(f"expected a '{FWF_VARIANT}' model, found '{header.variant}'")
    ints = header.integers
    _require(ints, ("dims", "lags", "horizon", "effective_rank", "sample_count"), "integer fields")
    _require(scalars, ("sigma", "pinv_cutoff", "theoretical_mmse", "desired_power", "ridge",
                       "support_low", "support_high"), "scalar fields")
    _require(arrays, ("weights", "rho", "eigenvalues"), "arrays")
    try:
        return FwfModel(
            spec=FeatureMapSpec(sigma=scalars["sigma"], dims=ints["dims"]),
            lags=ints["lags"],
            weights=arrays["weights"],
            rho=arrays["rho"],
            pinv_cutoff=scalars["pinv_cutoff"],
            theoretical_mmse=scalars["theoretical_mmse"],
            desired_power=scalars["desired_power"],
            horizon=ints["horizon"],
            effective_rank=ints["effective_rank"],
            eigenvalues=arrays["eigenvalues"],
            support=(scalars["support_low"], scalars["support_high"]),
            ridge=scalars["ridge"],
            sample_count=ints["sample_count"],
            warnings=tuple(header.warnings),
        )
    except InvalidInputError as e:
        raise ModelFormatError(f"inconsistent model file: {e.message}")


def save_model(model: FwfModel, path: Union[str, Path]) -> Path:
    """Write a fitted filter to ``path``."""
    path = write_envelope(path, encode_model(model))
    logger.info(f"Saved FWF model (D={model.dims}, L={model.lags}) to {path}")
    return path


def load_model(path: Union[str, Path]) -> FwfModel:
    """
    Read a fitted filter.

    Raises:
        ModelFormatError: Missing, truncated, corrupt or mismatched file
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except FileNotFoundError:
        raise ModelFormatError(f"model file not found: {path}")
    model = decode_model(data)
    logger.debug(f"Loaded FWF model from {path}")
    return model


def save_modes_csv(modes: ModeSet, path: Union[str, Path]) -> Path:
    """Write a mode set as ``tau,x,f_tau_x`` rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    modes.to_frame().to_csv(path, index=False)
    logger.info(f"Wrote {modes.lags} modes on {modes.grid.size} grid points to {path}")
    return path
