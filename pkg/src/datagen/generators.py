"""
Deterministic generators for the experimental signals.

All generators are pure functions of their arguments (including the seed).
The recursions are sequential, so each series is produced on one thread.
"""
from math import pi, sqrt
from typing import Callable, List, Optional, Sequence, Tuple
import logging

import numpy as np

from ..config.constants import (
    DIVERGENCE_LIMIT,
    ERROR_DIVERGENCE,
    MACKEY_GLASS_HISTORY,
    STATIONARY_SYSTEM_MEMORY_DEPTH,
    TRANSIENT_STEPS,
    NoiseStdMode,
    SeriesKind,
)
from ..exceptions import IntegrationError, InvalidInputError
from . import streams
from .io import load_csv
from .models import SeriesSpec

logger = logging.getLogger(__name__)


# ============================================================================
# SYNTHETIC STATIONARY SYSTEM
# D(n) = sum_tau g_tau(X(n - tau)), tau = 0..4
# ============================================================================

def _g0(x):
    return 0.5 * np.tanh(x) ** 2


def _g1(x):
    return np.sin(x) ** 3


def _g2(x):
    return 0.5 * np.tanh(x) ** 3


def _g3(x):
    return 0.2 * np.sin(x) ** 2


def _g4(x):
    return 0.75 * np.tanh(x) ** 2


_STATIONARY_COMPONENTS = (_g0, _g1, _g2, _g3, _g4)


def stationary_system_components() -> List[Callable[[np.ndarray], np.ndarray]]:
    """The true per-lag functions g_tau of the synthetic system, lag 0 first."""
    return list(_STATIONARY_COMPONENTS)


def stationary_system_memory_depth() -> int:
    """Number of lags the synthetic system depends on."""
    return STATIONARY_SYSTEM_MEMORY_DEPTH


def stationary_system_response(x: np.ndarray) -> np.ndarray:
    """Apply the system to an input series, zero-padding before the first sample."""
    x = np.asarray(x, dtype=float)
    depth = STATIONARY_SYSTEM_MEMORY_DEPTH
    padded = np.concatenate([np.zeros(depth - 1), x])
    output = np.zeros_like(x)
    for tau, component in enumerate(_STATIONARY_COMPONENTS):
        lagged = padded[depth - 1 - tau:depth - 1 - tau + x.size]
        output += component(lagged)
    return output


def gen_stationary_system(
    n: int,
    seed: int = 0,
    std_mode: NoiseStdMode = NoiseStdMode.VARIANCE,
    zero_input: bool = False,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Generate input X ~ N(0, pi) and the system output D.

    The first four outputs use zero-padded history; windows with L >= 5 never
    target them, shorter windows should drop STATIONARY_SYSTEM_WARMUP samples.

    Args:
        n: Number of samples (> 5)
        seed: Experiment seed
        std_mode: Read pi as the variance (default) or the standard deviation
        zero_input: Force X = 0

    Returns:
        Tuple of (X, D)
    """
    if n <= 5:
        raise InvalidInputError(f"n must exceed 5, got {n}")
    std = sqrt(pi) if NoiseStdMode(std_mode) == NoiseStdMode.VARIANCE else pi
    if zero_input:
        x = np.zeros(n)
    else:
        x = streams.stream(seed, streams.STATIONARY_INPUT).normal(0.0, std, n)
    return x, stationary_system_response(x)


# ============================================================================
# MACKEY-GLASS
# ============================================================================

def _check_divergence(value: float, step: int) -> None:
    if not np.isfinite(value) or abs(value) > DIVERGENCE_LIMIT:
        raise IntegrationError(ERROR_DIVERGENCE.format(step=step, value=abs(value)))


def gen_mackey_glass(
    n: int,
    beta: float = 0.2,
    gamma: float = 0.1,
    power: float = 10.0,
    delay: float = 30.0,
    dt: float = 0.1,
    subsample: int = 6,
    history: Optional[float] = None,
    seed: Optional[int] = None,
    transient_steps: int = TRANSIENT_STEPS,
) -> np.ndarray:
    """
    Integrate the Mackey-Glass equation with fourth-order Runge-Kutta.

    The delayed value at the start and end of each step is read from the step
    history; the two midpoint stages use the cubic Hermite interpolant of the
    stored history points and derivatives.

    Args:
        n: Number of emitted samples
        beta, gamma, power, delay: Equation parameters
        dt: Integration step
        subsample: Emit every subsample-th step
        history: Constant history on [-delay, 0]; None uses the seed (or the
            default level when no seed is given)
        seed: Seed for drawing the history level
        transient_steps: Steps discarded before the first emitted sample

    Returns:
        Array of n samples
    """
    for name, value in (("beta", beta), ("gamma", gamma), ("power", power), ("delay", delay), ("dt", dt)):
        if value <= 0:
            raise InvalidInputError(f"{name} must be positive, got {value}")
    if n < 1 or subsample < 1 or transient_steps < 0:
        raise InvalidInputError("n and subsample must be positive, transient_steps non-negative")

    if history is None:
        if seed is not None:
            history = float(streams.stream(seed, streams.MACKEY_GLASS_HISTORY_STREAM).uniform(0.5, 1.5))
        else:
            history = MACKEY_GLASS_HISTORY

    lag = max(int(round(delay / dt)), 1)
    steps = transient_steps + (n - 1) * subsample
    x = [float(history)] * (lag + 1) + [0.0] * steps
    f = [0.0] * (lag + 1 + steps)

    def rhs(current: float, delayed: float) -> float:
        return beta * delayed / (1.0 + delayed ** power) - gamma * current

    half = 0.5 * dt
    for k in range(lag, lag + steps):
        j = k - lag
        current = x[k]
        k1 = rhs(current, x[j])
        f[k] = k1
        midpoint = 0.5 * (x[j] + x[j + 1]) + dt * (f[j] - f[j + 1]) / 8.0
        k2 = rhs(current + half * k1, midpoint)
        k3 = rhs(current + half * k2, midpoint)
        k4 = rhs(current + dt * k3, x[j + 1])
        nxt = current + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        _check_divergence(nxt, k - lag)
        x[k + 1] = nxt

    start = lag + transient_steps
    series = np.asarray(x[start:start + (n - 1) * subsample + 1:subsample], dtype=float)
    logger.debug(f"Mackey-Glass: {n} samples, delay={delay}, dt={dt}, subsample={subsample}")
    return series


# ============================================================================
# LORENZ
# ============================================================================

def gen_lorenz(
    n: int,
    sigma: float = 10.0,
    rho: float = 28.0,
    beta: float = 8.0 / 3.0,
    dt: float = 0.01,
    subsample: int = 1,
    x0: Sequence[float] = (1.0, 1.0, 1.0),
    transient_steps: int = TRANSIENT_STEPS,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Integrate the Lorenz system with classical RK4.

    Returns:
        Tuple of (x, y, z), each with n samples
    """
    if n < 1 or subsample < 1 or transient_steps < 0 or dt <= 0:
        raise InvalidInputError("n, subsample and dt must be positive, transient_steps non-negative")
    if len(x0) != 3:
        raise InvalidInputError(f"x0 must have three coordinates, got {len(x0)}")

    def rhs(a: float, b: float, c: float) -> Tuple[float, float, float]:
        return sigma * (b - a), a * (rho - c) - b, a * b - beta * c

    px, py, pz = (float(v) for v in x0)
    out = np.empty((n, 3))
    total = transient_steps + (n - 1) * subsample
    emitted = 0
    half = 0.5 * dt
    for step in range(total + 1):
        if step >= transient_steps and (step - transient_steps) % subsample == 0:
            out[emitted] = (px, py, pz)
            emitted += 1
        if step == total:
            break
        k1 = rhs(px, py, pz)
        k2 = rhs(px + half * k1[0], py + half * k1[1], pz + half * k1[2])
        k3 = rhs(px + half * k2[0], py + half * k2[1], pz + half * k2[2])
        k4 = rhs(px + dt * k3[0], py + dt * k3[1], pz + dt * k3[2])
        px += dt * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) / 6.0
        py += dt * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) / 6.0
        pz += dt * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]) / 6.0
        _check_divergence(max(abs(px), abs(py), abs(pz)), step)

    return out[:, 0].copy(), out[:, 1].copy(), out[:, 2].copy()


# ============================================================================
# NOISE
# ============================================================================

def add_noise(series, std: float, seed: int) -> np.ndarray:
    """
    Add i.i.d. N(0, std^2) noise from the seed's noise stream.

    All noise levels share one standard-normal draw, so for a fixed seed the
    realizations differ only in scale. std = 0 returns an unchanged copy.
    """
    if std < 0:
        raise InvalidInputError(f"std must be non-negative, got {std}")
    series = np.array(series, dtype=float, copy=True)
    if std == 0:
        return series
    draw = streams.stream(seed, streams.MEASUREMENT_NOISE).standard_normal(series.shape)
    return series + std * draw


# ============================================================================
# DISPATCH
# ============================================================================

def generate_series(spec: SeriesSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    Build the (input, desired) pair described by a SeriesSpec.

    Prediction tasks (Mackey-Glass, CSV) return the same series twice; the
    prediction horizon is applied at windowing time. Normalization is left to
    the caller because its scale comes from each fold's training slice.
    """
    kind = SeriesKind(spec.kind)
    if kind == SeriesKind.STATIONARY_SYSTEM:
        params = spec.stationary
        return gen_stationary_system(
            spec.length, seed=spec.seed, std_mode=params.input_std_mode, zero_input=params.zero_input
        )
    if kind == SeriesKind.MACKEY_GLASS:
        params = spec.mackey_glass
        series = gen_mackey_glass(
            spec.length,
            beta=params.beta,
            gamma=params.gamma,
            power=params.power,
            delay=params.delay,
            dt=params.dt,
            subsample=params.subsample,
            history=params.history,
            seed=spec.seed if params.random_history else None,
            transient_steps=params.transient_steps,
        )
        return series, series.copy()
    if kind == SeriesKind.LORENZ_XZ:
        params = spec.lorenz
        x, _, z = gen_lorenz(
            spec.length,
            sigma=params.sigma,
            rho=params.rho,
            beta=params.beta,
            dt=params.dt,
            subsample=params.subsample,
            x0=params.x0,
            transient_steps=params.transient_steps,
        )
        return x, z

    series = load_csv(spec.csv.path, spec.csv.column)
    if series.size < spec.length:
        logger.warning(f"CSV holds {series.size} samples, fewer than the requested {spec.length}")
    series = series[:spec.length]
    return series, series.copy()
