"""Counter-based random number generation.

Every random quantity in the package is a pure function of a 64-bit key and
a cell counter: value(key, idx) = mix64(key + (idx+1)*GOLDEN), where mix64
is the splitmix64 finalizer.  Grids and Monte Carlo replicates are therefore
reproducible bit-for-bit across platforms and worker counts.

The numba kernels in ``_kernels`` implement the identical arithmetic on
uint64; tests pin the two implementations against each other.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_ENV_SALT = 0x243F6A8885A308D3

__all__ = [
    "mix64",
    "env_key",
    "replicate_seed",
    "cell_values",
    "uniform01",
    "bernoulli_threshold",
]


def mix64(x: int) -> int:
    """splitmix64 finalizer on a 64-bit integer (Python int arithmetic)."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * _MIX1) & MASK64
    x = ((x ^ (x >> 27)) * _MIX2) & MASK64
    return x ^ (x >> 31)


def env_key(seed: int) -> int:
    """Whitened stream key for the environment with the given seed."""
    return mix64((seed ^ _ENV_SALT) & MASK64)


def replicate_seed(master_seed: int, rep: int) -> int:
    """Seed of Monte Carlo replicate ``rep``; depends only on (master_seed, rep).

    Feeding this to ``sample_environment`` reproduces the exact grid the
    kernels use for that replicate.
    """
    return mix64((master_seed + (rep + 1) * GOLDEN) & MASK64)


def cell_values(key, idx: np.ndarray) -> np.ndarray:
    """uint64 stream values at the given cell counters (vectorized mix64).

    ``key`` may be a scalar or an array broadcastable against ``idx``.
    """
    key = np.asarray(key, dtype=np.uint64)
    z = key + (np.asarray(idx, dtype=np.uint64) + np.uint64(1)) * np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def uniform01(values: np.ndarray) -> np.ndarray:
    """Map uint64 words to doubles in the open interval (0,1)."""
    return ((values >> np.uint64(11)).astype(np.float64) + 0.5) * (2.0 ** -53)


def bernoulli_threshold(p: float) -> int:
    """uint64 threshold t with P{word < t} = p (up to 2**-64 quantization)."""
    if p >= 1.0:
        return MASK64  # callers special-case p == 1 where exactness matters
    return max(0, min(MASK64, int(p * float(1 << 64))))
