"""Bitmask conventions for spin configurations.

A configuration of n spins is a plain int: bit i set means spin i points
down (sigma_i = -1), bit i clear means up (sigma_i = +1). Basis state x of
the 2^n-dimensional state vector uses the same index.
"""

from __future__ import annotations

import numpy as np


def spins_from_config(config: int, n: int) -> np.ndarray:
    """Return the length-n array of +-1 spin values for a bitmask."""
    bits = (config >> np.arange(n)) & 1
    return 1 - 2 * bits


def config_from_spins(spins) -> int:
    """Inverse of spins_from_config; accepts any +-1 sequence."""
    config = 0
    for i, s in enumerate(spins):
        if s == -1:
            config |= 1 << i
        elif s != 1:
            raise ValueError(f"spin value must be +1 or -1, got {s!r}")
    return config


def complement(config: int, n: int) -> int:
    """Global spin flip: invert the low n bits."""
    return config ^ ((1 << n) - 1)


def popcount_array(configs: np.ndarray) -> np.ndarray:
    """Number of set bits (down spins) per configuration."""
    return np.bitwise_count(configs.astype(np.uint64)).astype(np.int64)


def config_to_string(config: int, n: int) -> str:
    """Render as +/- characters, vertex 0 first (e.g. '+--++-')."""
    return "".join("-" if (config >> i) & 1 else "+" for i in range(n))


def config_from_string(text: str) -> int:
    """Parse a +/- or 0/1 string; 0 maps to +1, 1 maps to -1."""
    config = 0
    for i, ch in enumerate(text):
        if ch in "-1":
            config |= 1 << i
        elif ch not in "+0":
            raise ValueError(f"invalid spin character {ch!r} at position {i}")
    return config
