"""Exact and statistical verification of the stationarity (Burke) property.

The one-step update ``burke_step`` maps an independent triple
(Ber(u), Geom(rho), Ber(p)) to a triple with the same joint law.  The exact
check enumerates the input law up to a geometric cutoff and compares the
pushforward against the product law; Monte Carlo checks on down-right paths
are a secondary smoke test with z-score threshold 4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import MissingBoundaryParamError, OutOfRangeError
from .lattice import burke_step
from .params import ModelParams, geometric_mean

__all__ = [
    "FactorizationReport",
    "StationarityReport",
    "exact_burke_factorization",
    "burke_pushforward",
    "mc_stationarity_check",
]


@dataclass(frozen=True)
class FactorizationReport:
    max_abs_deviation: float
    truncation_mass: float
    cutoff: int
    marginal_deviations: tuple[float, float, float]  # I, J, alpha


def _product_law(p: float, u: float, rho: float, jmax: int) -> np.ndarray:
    """Product Ber(u) x Geom(rho) x Ber(p) on {0,1} x {0..jmax} x {0,1}."""
    pi = np.array([1.0 - u, u])
    pj = rho * (1.0 - rho) ** np.arange(jmax + 1, dtype=float)
    if rho >= 1.0:
        pj = np.zeros(jmax + 1)
        pj[0] = 1.0
    pw = np.array([1.0 - p, p])
    return pi[:, None, None] * pj[None, :, None] * pw[None, None, :]


def burke_pushforward(joint_ij: np.ndarray, p: float) -> np.ndarray:
    """Push a joint law of (I, J) tensored with an independent Ber(p) weight
    through the update map.  Input shape (2, jmax+1); output (2, jmax+2, 2)
    over (I', J', alpha)."""
    jmax = joint_ij.shape[1] - 1
    out = np.zeros((2, jmax + 2, 2))
    for i in (0, 1):
        for j in range(jmax + 1):
            mass = joint_ij[i, j]
            if mass == 0.0:
                continue
            for w, pw in ((0, 1.0 - p), (1, p)):
                tri = burke_step(i, j, w)
                out[tri.i_new, tri.j_new, tri.alpha] += mass * pw
    return out


def exact_burke_factorization(params: ModelParams, cutoff: int) -> FactorizationReport:
    """Enumerate the update map exactly and report how far the output law is
    from the independent product (zero up to the geometric truncation)."""
    if not params.has_boundary:
        raise MissingBoundaryParamError("the stationarity check requires the u parameter")
    if cutoff < 10:
        raise OutOfRangeError("cutoff must be >= 10")
    p, u, rho = params.p, float(params.u), float(params.rho)
    in_ij = _product_law(p, u, rho, cutoff).sum(axis=2)  # inputs: independent (I, J)
    pushed = burke_pushforward(in_ij, p)
    reference = _product_law(p, u, rho, cutoff + 1)
    max_dev = float(np.abs(pushed - reference).max())
    truncation = 0.0 if rho >= 1.0 else (1.0 - rho) ** (cutoff + 1)

    marg_i = pushed.sum(axis=(1, 2))
    marg_j = pushed.sum(axis=(0, 2))
    marg_a = pushed.sum(axis=(0, 1))
    ref_i = np.array([1.0 - u, u])
    ref_j = reference.sum(axis=(0, 2))
    ref_a = np.array([1.0 - p, p])
    devs = (
        float(np.abs(marg_i - ref_i).max()),
        float(np.abs(marg_j - ref_j).max()),
        float(np.abs(marg_a - ref_a).max()),
    )
    return FactorizationReport(
        max_abs_deviation=max_dev,
        truncation_mass=truncation,
        cutoff=cutoff,
        marginal_deviations=devs,
    )


@dataclass(frozen=True)
class StationarityReport:
    reps: int
    m: int
    n: int
    z_scores: dict
    correlations: dict
    counts: dict

    @property
    def max_abs_z(self) -> float:
        return max(abs(v) for v in self.z_scores.values())


def _staircase(m: int, n: int) -> tuple[list[tuple[int, int]], list[tuple[int, int]], list[str]]:
    """Down-right staircase from (0, n) to (m, 0): horizontal-edge sites,
    vertical-edge sites, and the label order along the path."""
    hor, ver, order = [], [], []
    x, y = 0, n
    while (x, y) != (m, 0):
        if x < m:
            x += 1
            hor.append((x, y))
            order.append("I")
        if y > 0:
            y -= 1
            ver.append((x, y + 1))
            order.append("J")
    return hor, ver, order


def _batched_tables(xbits: np.ndarray, ybars: np.ndarray, bulk: np.ndarray) -> np.ndarray:
    """Passage tables for a batch of boundary environments.

    xbits (R, m), ybars (R, n), bulk (R, n, m); returns g with shape
    (R, m+1, n+1), same recursion as ``lattice.passage_time``.
    """
    R, m = xbits.shape
    n = ybars.shape[1]
    g = np.zeros((R, m + 1, n + 1), dtype=np.int64)
    np.cumsum(xbits, axis=1, out=g[:, 1:, 0])
    ycum = np.cumsum(ybars, axis=1)
    s = np.zeros((R, m + 1), dtype=np.int64)
    head = np.empty((R, m + 1), dtype=np.int64)
    for j in range(1, n + 1):
        np.cumsum(bulk[:, j - 1, :], axis=1, out=s[:, 1:])
        head[:, 0] = ycum[:, j - 1]
        head[:, 1:] = g[:, 1:, j - 1]
        g[:, :, j] = s + np.maximum.accumulate(head - s, axis=1)
    return g


def mc_stationarity_check(
    params: ModelParams,
    m: int,
    n: int,
    reps: int,
    master_seed: int,
    chunk: int = 1000,
) -> StationarityReport:
    """Simulate boundary environments and test the increment laws along the
    staircase down-right path plus the top row and right column.

    Reports z-scores for the Bernoulli(u) horizontal increments, the
    geometric vertical increments (mean and zero-probability), and the
    Bernoulli(p) interior labels, plus pooled correlations of adjacent path
    labels (expected zero under independence).
    """
    if not params.has_boundary:
        raise MissingBoundaryParamError("the stationarity check requires the u parameter")
    if m < 4 or n < 4 or reps < 100:
        raise OutOfRangeError("need m, n >= 4 and reps >= 100")
    p, u, rho = params.p, float(params.u), float(params.rho)
    thr_p = rng.bernoulli_threshold(p)
    thr_u = rng.bernoulli_threshold(u)
    stride = m + 1

    hor, ver, order = _staircase(m, n)
    q = min(m, n) - 2
    alpha_sites = [(a, q - a) for a in range(1, q)]  # interior of the staircase

    # per-replicate means feed the z-scores, so the standard errors stay valid
    # even though labels from different down-right paths are dependent
    rep_means = {"i": [], "j": [], "j0": [], "alpha": []}
    pair_ij = np.zeros(3)  # sum xy, sum x, sum y for (I_k, J_k) pairs
    pair_ji = np.zeros(3)
    n_pairs_ij = 0
    n_pairs_ji = 0

    bulk_idx = (
        np.arange(1, n + 1, dtype=np.uint64)[:, None] * np.uint64(stride)
        + np.arange(1, m + 1, dtype=np.uint64)[None, :]
    )
    x_idx = np.arange(1, m + 1, dtype=np.uint64)
    y_idx = np.arange(1, n + 1, dtype=np.uint64) * np.uint64(stride)

    done = 0
    while done < reps:
        r = min(chunk, reps - done)
        keys = np.array(
            [rng.env_key(rng.replicate_seed(master_seed, done + k)) for k in range(r)],
            dtype=np.uint64,
        )[:, None, None]
        words_bulk = rng.cell_values(keys, bulk_idx[None, :, :])
        bulk = (words_bulk < np.uint64(thr_p)).astype(np.int64)
        words_x = rng.cell_values(keys[:, :, 0], x_idx[None, :])
        if u >= 1.0:
            xbits = np.ones((r, m), dtype=np.int64)
        else:
            xbits = (words_x < np.uint64(thr_u)).astype(np.int64)
        if rho >= 1.0:
            ybars = np.zeros((r, n), dtype=np.int64)
        else:
            uy = rng.uniform01(rng.cell_values(keys[:, :, 0], y_idx[None, :]))
            ybars = np.floor(np.log(uy) / math.log1p(-rho)).astype(np.int64)
        g = _batched_tables(xbits, ybars, bulk)
        ifield = np.diff(g, axis=1)  # (R, m, n+1): I at (i, j) = ifield[:, i-1, j]
        jfield = np.diff(g, axis=2)  # (R, m+1, n): J at (i, j) = jfield[:, i, j-1]

        ivals = np.stack([ifield[:, i - 1, j] for (i, j) in hor], axis=1)
        jvals = np.stack([jfield[:, i, j - 1] for (i, j) in ver], axis=1)
        # top row and right column (the increments behind the growth limit)
        row_top = ifield[:, :, n]
        col_right = jfield[:, m, :]
        rep_means["i"].append((ivals.sum(axis=1) + row_top.sum(axis=1)) / (len(hor) + m))
        rep_means["j"].append((jvals.sum(axis=1) + col_right.sum(axis=1)) / (len(ver) + n))
        rep_means["j0"].append(((jvals == 0).sum(axis=1) + (col_right == 0).sum(axis=1)) / (len(ver) + n))

        avals = np.stack(
            [np.minimum(ifield[:, a, b], jfield[:, a, b] + bulk[:, b, a]) for (a, b) in alpha_sites],
            axis=1,
        )
        rep_means["alpha"].append(avals.mean(axis=1))

        labels = np.empty((r, len(order)), dtype=np.float64)
        hi = iter(range(len(hor)))
        vi = iter(range(len(ver)))
        col = 0
        for lab in order:
            if lab == "I":
                labels[:, col] = ivals[:, next(hi)]
            else:
                labels[:, col] = jvals[:, next(vi)]
            col += 1
        for k, (a_lab, b_lab) in enumerate(zip(order[:-1], order[1:])):
            x_, y_ = labels[:, k], labels[:, k + 1]
            if a_lab == "I":
                pair_ij += (float((x_ * y_).sum()), float(x_.sum()), float(y_.sum()))
                n_pairs_ij += r
            else:
                pair_ji += (float((x_ * y_).sum()), float(x_.sum()), float(y_.sum()))
                n_pairs_ji += r
        done += r

    n_i = reps * (len(hor) + m)
    n_j = reps * (len(ver) + n)
    n_a = reps * len(alpha_sites)
    ej = geometric_mean(rho)
    var_j = (1.0 - rho) / rho**2

    def _z(key: str, theory: float) -> float:
        means = np.concatenate(rep_means[key])
        se = means.std(ddof=1) / math.sqrt(reps)
        return float((means.mean() - theory) / max(se, 1e-300))

    z_scores = {
        "i_mean": _z("i", u),
        "j_mean": _z("j", ej),
        "j_zero": _z("j0", rho),
        "alpha_mean": _z("alpha", p),
    }

    def _corr(acc: np.ndarray, count: int, vx: float, vy: float) -> float:
        cov = acc[0] / count - (acc[1] / count) * (acc[2] / count)
        return cov / math.sqrt(max(vx * vy, 1e-300))

    correlations = {
        "adjacent_ij": _corr(pair_ij, n_pairs_ij, u * (1 - u), var_j),
        "adjacent_ji": _corr(pair_ji, n_pairs_ji, var_j, u * (1 - u)),
    }
    counts = {"i": n_i, "j": n_j, "alpha": n_a, "pairs_ij": n_pairs_ij, "pairs_ji": n_pairs_ji}
    return StationarityReport(
        reps=reps, m=m, n=n, z_scores=z_scores, correlations=correlations, counts=counts
    )
