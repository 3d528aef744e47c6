"""Numba kernels for the Monte Carlo engine.

Each replicate regenerates its environment on the fly from the counter-based
stream (same arithmetic as ``rng``; tests pin the two together), runs the
two-row passage-time recursion, and writes its corner value into its own
output slot, so results are bit-identical for any thread count.
"""

from __future__ import annotations

import numpy as np
from numba import config, njit, prange, uint64

# omp is present everywhere we run; avoids probing the (older) TBB install
config.THREADING_LAYER = "omp"

U1 = np.uint64(1)
GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_ENV_SALT = np.uint64(0x243F6A8885A308D3)


@njit(uint64(uint64), inline="always", cache=True)
def _mix64(x):
    x = (x ^ (x >> np.uint64(30))) * _M1
    x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


@njit(uint64(uint64, uint64), inline="always", cache=True)
def _cell(key, idx):
    return _mix64(key + (idx + U1) * GOLDEN)


@njit(inline="always", cache=True)
def _unif(word):
    return (np.float64(word >> np.uint64(11)) + 0.5) * (2.0 ** -53)


@njit(uint64(uint64, uint64), inline="always", cache=True)
def _env_key(master_seed, rep):
    return _mix64(_mix64(master_seed + (rep + U1) * GOLDEN) ^ _ENV_SALT)


@njit(cache=True)
def _one_corner(key, m, n, thr_p, thr_x, x_always_one, use_boundary, log1m_rho, row):
    stride = np.uint64(m + 1)
    acc = np.int64(0)
    row[0] = 0
    for i in range(1, m + 1):
        if x_always_one or _cell(key, np.uint64(i)) < thr_x:
            acc += 1
        row[i] = acc
    yacc = np.int64(0)
    for j in range(1, n + 1):
        base = np.uint64(j) * stride
        if use_boundary:
            uu = _unif(_cell(key, base))
            yacc += np.int64(np.floor(np.log(uu) / log1m_rho))
        row[0] = yacc
        for i in range(1, m + 1):
            w = np.int64(1) if _cell(key, base + np.uint64(i)) < thr_p else np.int64(0)
            c = row[i - 1] + w
            if c > row[i]:
                row[i] = c
    return row[m]


@njit(parallel=True, cache=True)
def corner_values(
    m, n, thr_p, thr_x, x_always_one, use_boundary, log1m_rho, master_seed, reps, out
):
    for rep in prange(reps):
        row = np.empty(m + 1, dtype=np.int64)
        key = _env_key(np.uint64(master_seed), np.uint64(rep))
        out[rep] = _one_corner(
            key, m, n, thr_p, thr_x, x_always_one, use_boundary, log1m_rho, row
        )
