"""Deterministic parallel Monte Carlo estimation.

Replicate k draws its environment from a counter-based stream keyed by
(master_seed, k) and cell index only, and writes into its own output slot;
aggregation runs in ascending replicate order.  Estimates are therefore
pure functions of (inputs, master_seed), bit-for-bit, for any thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from . import _kernels, rng
from .errors import MissingBoundaryParamError, OutOfRangeError
from .params import ModelParams
from .shapes import characteristic_slope, gpp, gpp_boundary

__all__ = [
    "McEstimate",
    "LeftTailRow",
    "simulate_corners",
    "estimate_growth",
    "estimate_tail",
    "estimate_lmgf",
    "left_tail_diagnostic",
    "set_threads",
]

Z95 = 1.959963984540054
_ROW_BUDGET = 1 << 26  # max lattice extent per axis
_LT_SALT = 0x5851F42D4C957F2D  # decorrelates the per-N runs of the left-tail scan


@dataclass(frozen=True)
class McEstimate:
    """One Monte Carlo estimate with reproducibility metadata."""

    quantity: str
    point: float
    half_width_95: float
    reps: int
    master_seed: int
    N: int
    meta: dict = field(default_factory=dict)
    censored: bool = False


@dataclass(frozen=True)
class LeftTailRow:
    N: int
    reps: int
    hits: int
    rate_estimate: float  # -log(phat)/N; censored rows hold the Wilson lower bound
    censored: bool


def set_threads(threads: int | None) -> None:
    """Cap the numba worker count; results do not depend on it."""
    if threads is not None:
        numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))


def _geometry(s: float, t: float, N: int) -> tuple[int, int]:
    if N < 1 or s < 0 or t < 0:
        raise OutOfRangeError("need N >= 1 and a direction in the closed quadrant")
    m, n = int(N * s), int(N * t)
    if m < 1 or n < 1:
        raise OutOfRangeError(f"degenerate lattice {m}x{n}; increase N or the direction")
    if max(m, n) > _ROW_BUDGET:
        raise OutOfRangeError(f"lattice extent {max(m, n)} exceeds the memory budget")
    return m, n


def simulate_corners(
    params: ModelParams,
    with_boundary: bool,
    s: float,
    t: float,
    N: int,
    reps: int,
    master_seed: int,
    threads: int | None = None,
) -> np.ndarray:
    """Corner passage times of ``reps`` independent environments."""
    if with_boundary and not params.has_boundary:
        raise MissingBoundaryParamError("boundary simulation requires the u parameter")
    if reps < 1:
        raise OutOfRangeError("reps must be >= 1")
    m, n = _geometry(s, t, N)
    set_threads(threads)
    thr_p = np.uint64(rng.bernoulli_threshold(params.p))
    if with_boundary:
        u = float(params.u)
        thr_x = np.uint64(rng.bernoulli_threshold(u))
        x_always_one = u >= 1.0
        rho = float(params.rho)
        log1m_rho = -math.inf if rho >= 1.0 else math.log1p(-rho)
    else:
        thr_x, x_always_one, log1m_rho = thr_p, False, -math.inf
    out = np.empty(reps, dtype=np.int64)
    _kernels.corner_values(
        m,
        n,
        thr_p,
        thr_x,
        x_always_one,
        with_boundary,
        log1m_rho,
        np.uint64(master_seed & rng.MASK64),
        reps,
        out,
    )
    return out


def _meta(params: ModelParams, with_boundary: bool, s: float, t: float, **extra) -> dict:
    d = {"p": params.p, "u": params.u, "s": s, "t": t, "with_boundary": with_boundary}
    d.update(extra)
    return d


def estimate_growth(
    params: ModelParams,
    with_boundary: bool,
    s: float,
    t: float,
    N: int,
    reps: int,
    master_seed: int,
    threads: int | None = None,
) -> McEstimate:
    """Mean and 95% CI of the scaled corner passage time G/N."""
    if reps < 2:
        raise OutOfRangeError("reps must be >= 2")
    g = simulate_corners(params, with_boundary, s, t, N, reps, master_seed, threads)
    vals = g / float(N)
    point = float(vals.mean())
    hw = Z95 * float(vals.std(ddof=1)) / math.sqrt(reps)
    return McEstimate(
        quantity="growth",
        point=point,
        half_width_95=hw,
        reps=reps,
        master_seed=master_seed,
        N=N,
        meta=_meta(params, with_boundary, s, t),
    )


def _wilson(hits: int, n: int) -> tuple[float, float]:
    ph = hits / n
    z2 = Z95 * Z95
    denom = 1.0 + z2 / n
    center = (ph + z2 / (2.0 * n)) / denom
    half = Z95 * math.sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom
    return max(center - half, 1e-300), min(center + half, 1.0)


def estimate_tail(
    params: ModelParams,
    with_boundary: bool,
    s: float,
    t: float,
    r: float,
    N: int,
    reps: int,
    master_seed: int,
    threads: int | None = None,
) -> McEstimate:
    """Estimate of -log P{G >= N r} / N with a Wilson interval moved to the
    rate scale.  Zero-hit runs return a censored lower bound, not a point."""
    if reps < 2:
        raise OutOfRangeError("reps must be >= 2")
    g = simulate_corners(params, with_boundary, s, t, N, reps, master_seed, threads)
    hits = int((g >= N * r).sum())
    p_lo, p_hi = _wilson(hits, reps)
    meta = _meta(params, with_boundary, s, t, r=r, hits=hits)
    if hits == 0:
        return McEstimate(
            quantity="tail_rate",
            point=-math.log(p_hi) / N,
            half_width_95=math.inf,
            reps=reps,
            master_seed=master_seed,
            N=N,
            meta=meta,
            censored=True,
        )
    point = -math.log(hits / reps) / N
    hw = (math.log(p_hi) - math.log(p_lo)) / (2.0 * N)
    return McEstimate(
        quantity="tail_rate",
        point=point,
        half_width_95=hw,
        reps=reps,
        master_seed=master_seed,
        N=N,
        meta=meta,
    )


def estimate_lmgf(
    params: ModelParams,
    with_boundary: bool,
    s: float,
    t: float,
    xi: float,
    N: int,
    reps: int,
    master_seed: int,
    threads: int | None = None,
    batches: int = 20,
) -> McEstimate:
    """Estimate of log E[exp(xi G)] / N, max-shift stabilized; the CI comes
    from splitting the replicates into deterministic batches."""
    if reps < 2 * batches:
        raise OutOfRangeError(f"reps must be >= {2 * batches} for batched CIs")
    g = simulate_corners(params, with_boundary, s, t, N, reps, master_seed, threads)

    def lme(vals: np.ndarray) -> float:
        shifted = xi * vals
        mx = float(shifted.max())
        return (mx + math.log(float(np.exp(shifted - mx).mean()))) / N

    point = lme(g)
    edges = np.linspace(0, reps, batches + 1, dtype=int)
    batch_vals = np.array([lme(g[a:b]) for a, b in zip(edges[:-1], edges[1:])])
    hw = Z95 * float(batch_vals.std(ddof=1)) / math.sqrt(batches)
    return McEstimate(
        quantity="lmgf",
        point=point,
        half_width_95=hw,
        reps=reps,
        master_seed=master_seed,
        N=N,
        meta=_meta(params, with_boundary, s, t, xi=xi),
    )


def left_tail_diagnostic(
    params: ModelParams,
    with_boundary: bool,
    s: float,
    t: float,
    r: float,
    N_list: list[int],
    reps: int,
    master_seed: int,
    threads: int | None = None,
) -> list[LeftTailRow]:
    """Per-N normalized log-probability of {G <= N r} below the limit shape.

    An increasing -log(phat)/N column is the desk-scale signature of the
    superexponential (speed N^2) left tail.  For the boundary model the
    direction must be parallel to the characteristic one, where the bound
    applies.
    """
    if sorted(N_list) != list(N_list) or len(N_list) == 0:
        raise OutOfRangeError("N_list must be ascending and nonempty")
    if with_boundary:
        if abs(t / s - characteristic_slope(params)) > 1e-9:
            raise OutOfRangeError("boundary left-tail diagnostic needs the characteristic direction")
        limit = gpp_boundary(s, t, params)
    else:
        limit = gpp(s, t, params.p).value
    if not r < limit:
        raise OutOfRangeError(f"need r < {limit} (the law-of-large-numbers limit)")
    rows = []
    for N in N_list:
        sub_seed = rng.mix64((master_seed ^ _LT_SALT) + N * rng.GOLDEN)
        g = simulate_corners(params, with_boundary, s, t, N, reps, sub_seed, threads)
        hits = int((g <= N * r).sum())
        if hits == 0:
            _, p_hi = _wilson(0, reps)
            rows.append(LeftTailRow(N=N, reps=reps, hits=0, rate_estimate=-math.log(p_hi) / N, censored=True))
        else:
            rows.append(
                LeftTailRow(N=N, reps=reps, hits=hits, rate_estimate=-math.log(hits / reps) / N, censored=False)
            )
    return rows
