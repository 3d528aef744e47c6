"""Environments, passage-time dynamic programming, and exact oracles.

Geometry: sites (i, j) in {0..m} x {0..n}, origin weight 0.  Up-right paths
take steps e1 = (1,0), e2 = (0,1).  A horizontal step collects the weight at
its arrival site; vertical steps collect nothing, except along the vertical
axis in the boundary model, where the stationary construction lets a path
sum the geometric axis weights before entering the bulk.

The passage time satisfies

    g(i, j) = max(g(i, j-1), g(i-1, j) + w(i, j)),   i, j >= 1,

with g(i, 0) = prefix sums of the horizontal-axis row and g(0, j) = prefix
sums of the vertical-axis column (zero without boundary).  In the i.i.d.
model the horizontal-axis row carries ordinary Bernoulli(p) weights (they
score through e1 steps along the axis), so it is stored together with the
bulk; in the boundary model the same row holds the Bernoulli(u) boundary.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import NamedTuple

import numpy as np

from . import rng
from .errors import MissingBoundaryParamError, OutOfRangeError, TooLargeError
from .params import ModelParams

__all__ = [
    "EnvironmentGrid",
    "PassageField",
    "BurkeTriple",
    "ExactLaw",
    "sample_environment",
    "passage_time",
    "corner_passage_time",
    "restricted_passage_time",
    "increment_fields",
    "burke_step",
    "brute_force_passage",
    "exact_law",
    "default_y_cutoff",
    "env_to_json",
    "env_from_json",
]

_NEG = -(1 << 62)  # sentinel for forbidden sites in first-step-restricted DP

MAX_ENUM = 1 << 24  # configuration budget shared by the exact oracles


@dataclass(frozen=True)
class EnvironmentGrid:
    """One sampled environment on {0..m} x {0..n}.

    ``weights`` has shape (n+1, m): row j holds the weights of sites
    (1..m, j).  Row 0 is the horizontal-axis row (Bernoulli(p) in the
    i.i.d. model, Bernoulli(u) in the boundary model).  ``boundary_y``
    holds the geometric weights of sites (0, 1..n) and is None in the
    i.i.d. model.
    """

    m: int
    n: int
    weights: np.ndarray
    boundary_y: np.ndarray | None
    seed: int

    @property
    def has_boundary(self) -> bool:
        return self.boundary_y is not None

    @property
    def bulk(self) -> np.ndarray:
        """Strict-bulk weights, shape (n, m): row j-1 holds sites (1..m, j)."""
        return self.weights[1:]

    @property
    def boundary_x(self) -> np.ndarray | None:
        """Bernoulli(u) axis row in the boundary model, else None."""
        return self.weights[0] if self.has_boundary else None


@dataclass(frozen=True)
class PassageField:
    """Full passage-time table g, indexed g[i, j], shape (m+1, n+1)."""

    g: np.ndarray
    has_boundary: bool


class BurkeTriple(NamedTuple):
    i_new: int
    j_new: int
    alpha: int


def sample_environment(
    params: ModelParams,
    m: int,
    n: int,
    seed: int,
    with_boundary: bool = False,
) -> EnvironmentGrid:
    """Sample an environment, fully determined by (params, m, n, seed)."""
    if m < 1 or n < 1:
        raise OutOfRangeError("m and n must be >= 1")
    if with_boundary and not params.has_boundary:
        raise MissingBoundaryParamError("boundary sampling requires the u parameter")
    key = rng.env_key(seed)
    stride = m + 1
    thr_p = np.uint64(rng.bernoulli_threshold(params.p))

    cols = np.arange(1, m + 1, dtype=np.uint64)
    rows = np.arange(0, n + 1, dtype=np.uint64) * np.uint64(stride)
    idx = rows[:, None] + cols[None, :]
    words = rng.cell_values(key, idx)
    weights = (words < thr_p).astype(np.int64)
    boundary_y = None
    if with_boundary:
        u = float(params.u)
        if u >= 1.0:
            weights[0] = 1
        else:
            weights[0] = (words[0] < np.uint64(rng.bernoulli_threshold(u))).astype(np.int64)
        rho = float(params.rho)
        yidx = np.arange(1, n + 1, dtype=np.uint64) * np.uint64(stride)
        if rho >= 1.0:
            boundary_y = np.zeros(n, dtype=np.int64)
        else:
            uvals = rng.uniform01(rng.cell_values(key, yidx))
            boundary_y = np.floor(np.log(uvals) / math.log1p(-rho)).astype(np.int64)
    return EnvironmentGrid(m=m, n=n, weights=weights, boundary_y=boundary_y, seed=int(seed))


def _row_sweep(prev: np.ndarray, left: float, w_row: np.ndarray) -> np.ndarray:
    """One DP row: new[i] = max(prev[i], new[i-1] + w[i]), new[0] = left.

    Solved in closed form as S[i] + running-max of (entry values - S), where
    S are the prefix sums of the row weights; exact integer arithmetic, so
    the result is identical to a sequential row-major sweep.
    """
    m = w_row.shape[0]
    s = np.empty(m + 1, dtype=np.int64)
    s[0] = 0
    np.cumsum(w_row, out=s[1:])
    head = np.empty(m + 1, dtype=np.int64)
    head[0] = left
    head[1:] = prev[1:]
    return s + np.maximum.accumulate(head - s)


def passage_time(env: EnvironmentGrid) -> PassageField:
    """Full DP table of passage times for the given environment."""
    m, n = env.m, env.n
    g = np.zeros((m + 1, n + 1), dtype=np.int64)
    g[1:, 0] = np.cumsum(env.weights[0])
    ycum = np.cumsum(env.boundary_y) if env.has_boundary else np.zeros(n, dtype=np.int64)
    for j in range(1, n + 1):
        g[:, j] = _row_sweep(g[:, j - 1], ycum[j - 1], env.weights[j])
    return PassageField(g=g, has_boundary=env.has_boundary)


def corner_passage_time(env: EnvironmentGrid) -> int:
    """Corner value g(m, n) using a single rolling row of memory."""
    row = np.zeros(env.m + 1, dtype=np.int64)
    row[1:] = np.cumsum(env.weights[0])
    ycum = np.cumsum(env.boundary_y) if env.has_boundary else np.zeros(env.n, dtype=np.int64)
    for j in range(1, env.n + 1):
        row = _row_sweep(row, ycum[j - 1], env.weights[j])
    return int(row[-1])


def restricted_passage_time(env: EnvironmentGrid, first_step: str) -> int:
    """Corner passage time over paths forced to start with e1 or e2.

    The maximum of the two restrictions equals the unrestricted corner value.
    """
    if not env.has_boundary:
        raise MissingBoundaryParamError("first-step restriction is defined for the boundary model")
    if first_step not in ("e1", "e2"):
        raise OutOfRangeError(f"first_step must be 'e1' or 'e2', got {first_step!r}")
    m, n = env.m, env.n
    row = np.zeros(m + 1, dtype=np.int64)
    ycum = np.cumsum(env.boundary_y)
    if first_step == "e1":
        row[1:] = np.cumsum(env.weights[0])
        left = np.full(n, _NEG, dtype=np.int64)  # y-axis unreachable
    else:
        row[:] = _NEG  # x-axis unreachable beyond the origin
        left = ycum
    for j in range(1, n + 1):
        row = _row_sweep(row, left[j - 1], env.weights[j])
    return int(row[-1])


def increment_fields(field: PassageField) -> tuple[np.ndarray, np.ndarray]:
    """Horizontal and vertical passage-time increments.

    Returns (I, J) with I[i-1, j] = g(i,j) - g(i-1,j) for i in 1..m and
    J[i, j-1] = g(i,j) - g(i,j-1) for j in 1..n.
    """
    return np.diff(field.g, axis=0), np.diff(field.g, axis=1)


def burke_step(i_old: int, j_old: int, omega: int) -> BurkeTriple:
    """One stationarity update of the increment pair with a fresh bulk weight.

    i_new = max(i_old - j_old, omega), j_new = (j_old - i_old + omega)^+,
    alpha = min(i_old, j_old + omega).
    """
    if i_old not in (0, 1) or omega not in (0, 1) or j_old < 0:
        raise OutOfRangeError("need i_old, omega in {0,1} and j_old >= 0")
    i_new = max(i_old - j_old, omega)
    j_new = max(j_old - i_old + omega, 0)
    alpha = min(i_old, j_old + omega)
    return BurkeTriple(i_new=i_new, j_new=j_new, alpha=alpha)


@lru_cache(maxsize=64)
def _path_heights(m: int, n: int) -> np.ndarray:
    """All up-right paths as nondecreasing height profiles, shape (P, m).

    Row (h_1 <= ... <= h_m) lists the height at which each horizontal step
    is taken; h_1 is also the length of the initial vertical-axis run.
    """
    return np.array(list(combinations_with_replacement(range(n + 1), m)), dtype=np.int64)


def brute_force_passage(env: EnvironmentGrid) -> int:
    """Maximum path weight by explicit enumeration of all up-right paths."""
    m, n = env.m, env.n
    if m + n > 24 or math.comb(m + n, m) > MAX_ENUM:
        raise TooLargeError(f"{math.comb(m + n, m)} paths exceed the enumeration budget")
    ysum = np.zeros(n + 1, dtype=np.int64)
    if env.has_boundary:
        ysum[1:] = np.cumsum(env.boundary_y)
    if m == 0:
        return int(ysum[n])
    heights = _path_heights(m, n)
    site = env.weights[heights, np.arange(m)[None, :]]
    scores = ysum[heights[:, 0]] + site.sum(axis=1)
    return int(scores.max())


@dataclass(frozen=True)
class ExactLaw:
    """Exact distribution of the corner passage time (up to truncation)."""

    values: np.ndarray
    probs: np.ndarray
    truncation_mass: float

    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))

    def tail_geq(self, x: float) -> float:
        """P{G >= x} within the enumerated mass."""
        return float(self.probs[self.values >= x].sum())

    def tail_leq(self, x: float) -> float:
        return float(self.probs[self.values <= x].sum())


def default_y_cutoff(rho: float, tol: float = 1e-12) -> int:
    """Smallest K with geometric tail mass (1-rho)**(K+1) below tol."""
    if rho >= 1.0:
        return 0
    return max(0, math.ceil(math.log(tol) / math.log1p(-rho)) - 1)


def _chunked_bit_dp(m: int, n: int, nbits: int, ycum: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Corner value and bit count for every bulk configuration.

    Configurations are the integers 0..2**nbits-1, bit b = weight at site
    (1 + b % m, b // m).  Returns (corner values, popcounts).
    """
    total = 1 << nbits
    corners = np.empty(total, dtype=np.int64)
    ones = np.empty(total, dtype=np.int64)
    chunk = min(total, 1 << 16)
    shifts = np.arange(nbits, dtype=np.uint64)
    for start in range(0, total, chunk):
        cfg = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        bits = ((cfg[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.int64)
        ones[start:start + cfg.size] = bits.sum(axis=1)
        w = bits.reshape(cfg.size, n + 1, m)
        g = np.zeros((cfg.size, m + 1), dtype=np.int64)
        g[:, 1:] = np.cumsum(w[:, 0, :], axis=1)
        for j in range(1, n + 1):
            s = np.zeros((cfg.size, m + 1), dtype=np.int64)
            np.cumsum(w[:, j, :], axis=1, out=s[:, 1:])
            head = np.empty_like(g)
            head[:, 0] = ycum[j - 1]
            head[:, 1:] = g[:, 1:]
            g = s + np.maximum.accumulate(head - s, axis=1)
        corners[start:start + cfg.size] = g[:, -1]
    return corners, ones


def exact_law(
    params: ModelParams,
    m: int,
    n: int,
    with_boundary: bool = False,
    y_cutoff: int | None = None,
) -> ExactLaw:
    """Exact law of g(m, n) by enumeration over all environment configurations.

    Boundary geometric weights are truncated at y_cutoff; the discarded
    probability mass is reported in the result.  Raises TooLargeError when
    the configuration count exceeds the enumeration budget.
    """
    if m < 1 or n < 1:
        raise OutOfRangeError("m and n must be >= 1")
    if with_boundary and not params.has_boundary:
        raise MissingBoundaryParamError("boundary law requires the u parameter")
    p = params.p
    nbits = m * (n + 1)
    if not with_boundary:
        if (1 << nbits) > MAX_ENUM:
            raise TooLargeError(f"2**{nbits} bulk configurations exceed the budget")
        corners, ones = _chunked_bit_dp(m, n, nbits, np.zeros(n, dtype=np.int64))
        logp = ones * math.log(p) + (nbits - ones) * math.log1p(-p)
        probs = np.exp(logp)
        table = np.bincount(corners, weights=probs)
        vals = np.nonzero(table)[0]
        return ExactLaw(values=vals, probs=table[vals], truncation_mass=0.0)

    u, rho = float(params.u), float(params.rho)
    cutoff = default_y_cutoff(rho) if y_cutoff is None else int(y_cutoff)
    n_y = (cutoff + 1) ** n
    if (1 << nbits) * n_y > MAX_ENUM:
        raise TooLargeError("bit configurations x truncated geometric tuples exceed the budget")

    # Split the axis row (Bernoulli(u)) from the p-bits so each configuration
    # gets the right probability; enumerate truncated geometric columns outside.
    nbits_p = m * n
    cfgs = np.arange(1 << nbits, dtype=np.uint64)
    row0 = np.zeros(1 << nbits, dtype=np.int64)
    for b in range(m):
        row0 += ((cfgs >> np.uint64(b)) & np.uint64(1)).astype(np.int64)
    acc: dict[int, float] = {}
    kept_y = 1.0 if rho >= 1.0 else (1.0 - (1.0 - rho) ** (cutoff + 1)) ** n
    y_tuple = np.zeros(n, dtype=np.int64)
    for yi in range(n_y):
        t = yi
        for j in range(n):
            y_tuple[j] = t % (cutoff + 1)
            t //= cutoff + 1
        if rho >= 1.0:
            py = 1.0 if yi == 0 else 0.0
        else:
            py = (rho ** n) * (1.0 - rho) ** int(y_tuple.sum())
        if py == 0.0:
            continue
        corners, ones = _chunked_bit_dp(m, n, nbits, np.cumsum(y_tuple))
        ones_p = ones - row0
        logp_bulk = ones_p * math.log(p) + (nbits_p - ones_p) * math.log1p(-p)
        if u >= 1.0:
            logp = np.where(row0 == m, logp_bulk, -math.inf)
        else:
            logp = row0 * math.log(u) + (m - row0) * math.log1p(-u) + logp_bulk
        probs = np.exp(logp) * py
        for v, pr in zip(corners.tolist(), probs.tolist()):
            if pr > 0.0:
                acc[v] = acc.get(v, 0.0) + pr
    vals = np.array(sorted(acc), dtype=np.int64)
    probs = np.array([acc[v] for v in vals.tolist()])
    return ExactLaw(values=vals, probs=probs, truncation_mass=1.0 - kept_y)


def env_to_json(env: EnvironmentGrid) -> str:
    """Serialize an environment for failure reproduction.

    Field order: header (m, n, flags, seed), then the row-major weight table
    (rows j = 0..n of sites (1..m, j)), then the vertical boundary column.
    """
    doc = {
        "format": "bernlpp-env-v1",
        "m": env.m,
        "n": env.n,
        "flags": int(env.has_boundary),
        "seed": env.seed,
        "weights": env.weights.tolist(),
        "boundary_y": env.boundary_y.tolist() if env.has_boundary else None,
    }
    return json.dumps(doc)


def env_from_json(text: str) -> EnvironmentGrid:
    doc = json.loads(text)
    if doc.get("format") != "bernlpp-env-v1":
        raise OutOfRangeError("not a bernlpp environment dump")
    by = doc["boundary_y"]
    return EnvironmentGrid(
        m=int(doc["m"]),
        n=int(doc["n"]),
        weights=np.asarray(doc["weights"], dtype=np.int64),
        boundary_y=None if by is None else np.asarray(by, dtype=np.int64),
        seed=int(doc["seed"]),
    )
