"""
Named random streams.

Every component that needs randomness asks for its own stream by name. A
stream is numpy's counter-based Philox generator keyed by
SeedSequence(seed, spawn_key=(crc32(name),)), so streams for different names
are independent and adding a new consumer never shifts an existing one.
"""
import zlib

import numpy as np

STATIONARY_INPUT = "stationary_system.input"
MEASUREMENT_NOISE = "noise"
MACKEY_GLASS_HISTORY_STREAM = "mackey_glass.history"


def stream(seed: int, name: str) -> np.random.Generator:
    """
    Deterministic generator for (seed, name).

    Args:
        seed: Non-negative 64-bit experiment seed
        name: Component name, e.g. "noise"

    Returns:
        numpy Generator backed by Philox
    """
    key = zlib.crc32(name.encode("utf-8"))
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=(key,))
    return np.random.Generator(np.random.Philox(sequence))
