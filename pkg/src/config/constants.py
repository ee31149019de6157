"""
Application-wide constants and enums.
"""

from enum import Enum


class SeriesKind(str, Enum):
    """Kinds of signals the data generators can produce."""
    STATIONARY_SYSTEM = "stationary_system"
    MACKEY_GLASS = "mackey_glass"
    LORENZ_XZ = "lorenz_xz"
    CSV = "csv"


class MethodName(str, Enum):
    """Filters the benchmark harness knows how to fit."""
    FWF = "fwf"
    WIENER = "wiener"
    KLMS = "klms"
    KRLS = "krls"
    KRR = "krr"
    GPR = "gpr"


class FigureId(str, Enum):
    """Figure-reproduction tables emitted by the bench module."""
    MSE_VS_SAMPLES = "mse_vs_samples"
    MSE_VS_NOISE = "mse_vs_noise"
    MMSE_SWEEP = "mmse_sweep"
    DIMS_SWEEP = "dims_sweep"
    MODES = "modes"
    PREDICTIONS = "predictions"


class NormalizationMode(str, Enum):
    """How a series is scaled using its training slice."""
    NONE = "none"
    NORM = "norm"
    MAX_ABS = "max_abs"
    STD = "std"


class NoiseStdMode(str, Enum):
    """Reading of the N(0, pi) input distribution of the synthetic system."""
    VARIANCE = "variance"
    STD = "std"


# Numerical tolerances
PSD_TOLERANCE = 1e-8  # relative to lambda_max
SYMMETRY_TOLERANCE = 1e-12
DEFAULT_PINV_EPSILON = 1e-10

# Feature map
MULTIVARIATE_CAPACITY = 10 ** 6

# Filter defaults
DEFAULT_SIGMA = 1.0
DEFAULT_DIMS = 30
DEFAULT_LAGS = 5
DEFAULT_HORIZON = 1
DEFAULT_SEED = 0
FLATNESS_PERCENTILES = (5.0, 95.0)

# Data generation
TRANSIENT_STEPS = 1000
DIVERGENCE_LIMIT = 1e6
STATIONARY_SYSTEM_MEMORY_DEPTH = 5
STATIONARY_SYSTEM_WARMUP = STATIONARY_SYSTEM_MEMORY_DEPTH - 1
MACKEY_GLASS_HISTORY = 1.2

# Cross validation
DEFAULT_FOLDS = 5
DEFAULT_TEST_LEN = 300
DEFAULT_SAMPLE_SIZES = (250, 500, 1000, 2000, 4000)
DEFAULT_NOISE_LEVELS = (0.0, 0.01, 0.05, 0.1, 0.2)
# A cell whose MSE exceeds this multiple of the training target power has diverged
FILTER_DIVERGENCE_RATIO = 1e6

# Timing
MIN_TIMING_REPEATS = 30
DEFAULT_TIMING_WARMUP = 100

# Model file envelope
MODEL_MAGIC = b"FWFM"
MODEL_FORMAT_VERSION = 1

# Error Messages
ERROR_NON_FINITE = "Input contains non-finite values."
ERROR_EMPTY_WINDOW = "Window must contain at least one sample."
ERROR_LENGTH_MISMATCH = "Expected length {expected}, got {actual}."
ERROR_SERIES_TOO_SHORT = "Series of length {n} is too short for lags={lags}, horizon={horizon}."
ERROR_PSD_VIOLATION = "Matrix is not PSD: lambda_min={lam_min:.3e}, lambda_max={lam_max:.3e}."
ERROR_CAPACITY = "Feature dimension {size} exceeds the enumeration guard of {limit}."
ERROR_DIVERGENCE = "Integration diverged at step {step} (|x|={value:.3e})."
ERROR_CONDITIONING = "Gram solve failed for lambda={lam:.3e}; try lambda >= {suggested:.3e}."
ERROR_FILTER_DIVERGED = "{split} MSE {mse:.3e} is non-finite or above {ratio:.0e} x target power {power:.3e}."
ERROR_MISSING_AXIS = "Report is missing the '{column}' axis needed by figure '{figure}'."
