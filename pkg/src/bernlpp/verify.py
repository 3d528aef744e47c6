"""End-to-end verification checks tying the analytic and stochastic engines.

Each check returns a CheckResult; ``run_all`` executes the whole battery.
``full=True`` runs the documented reference scales (several minutes of
Monte Carlo); the quick variants use reduced replicate counts with
correspondingly looser tolerances and are meant as a fast smoke gate.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import rng
from .burke import _batched_tables, exact_burke_factorization
from .lattice import _path_heights, passage_time, sample_environment
from .ldp import istar, jstar, rate_I, rlem_gap, ustar
from .lmgf import ell_threshold, k_threshold, lambda_boundary, pole_xi
from .mc import estimate_growth, estimate_lmgf, estimate_tail, left_tail_diagnostic
from .params import validate_params
from .shapes import characteristic_slope, gpp, gpp_boundary

__all__ = ["CheckResult", "run_all"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _result(name: str, passed, detail: str, t0: float) -> CheckResult:
    return CheckResult(name=name, passed=bool(passed), detail=detail, seconds=time.perf_counter() - t0)


def _batched_environments(params, m, n, with_boundary, seeds):
    """Vectorized counterpart of sample_environment for a batch of seeds."""
    stride = m + 1
    keys = np.array([rng.env_key(s) for s in seeds], dtype=np.uint64)[:, None, None]
    idx = (
        np.arange(0, n + 1, dtype=np.uint64)[:, None] * np.uint64(stride)
        + np.arange(1, m + 1, dtype=np.uint64)[None, :]
    )
    words = rng.cell_values(keys, idx[None, :, :])
    thr_p = np.uint64(rng.bernoulli_threshold(params.p))
    weights = (words < thr_p).astype(np.int64)  # (B, n+1, m)
    if with_boundary:
        u = float(params.u)
        if u >= 1.0:
            weights[:, 0, :] = 1
        else:
            weights[:, 0, :] = (words[:, 0, :] < np.uint64(rng.bernoulli_threshold(u))).astype(np.int64)
        rho = float(params.rho)
        yidx = np.arange(1, n + 1, dtype=np.uint64) * np.uint64(stride)
        if rho >= 1.0:
            ybars = np.zeros((len(seeds), n), dtype=np.int64)
        else:
            uy = rng.uniform01(rng.cell_values(keys[:, :, 0], yidx[None, :]))
            ybars = np.floor(np.log(uy) / math.log1p(-rho)).astype(np.int64)
    else:
        ybars = np.zeros((len(seeds), n), dtype=np.int64)
    return weights, ybars


def _batched_brute(weights: np.ndarray, ybars: np.ndarray, with_boundary: bool) -> np.ndarray:
    """All-path enumeration for a batch: max over height profiles."""
    b, n1, m = weights.shape
    n = n1 - 1
    heights = _path_heights(m, n)
    ysum = np.zeros((b, n + 1), dtype=np.int64)
    if with_boundary:
        ysum[:, 1:] = np.cumsum(ybars, axis=1)
    site = weights[:, heights, np.arange(m)[None, :]]  # (B, P, m)
    scores = ysum[:, heights[:, 0]] + site.sum(axis=2)
    return scores.max(axis=1)


def check_oracle_equivalence(full: bool = True, seed: int = 20240901) -> CheckResult:
    """DP passage times match brute-force path enumeration exactly."""
    t0 = time.perf_counter()
    per_size = 1000 if full else 100
    params = validate_params(0.25, 0.5)
    worst = 0
    pin_bad = 0
    total = 0
    for with_boundary in (False, True):
        for m in range(1, 5):
            for n in range(1, 7):
                seeds = [rng.replicate_seed(seed + 97 * m + n + int(with_boundary), k) for k in range(per_size)]
                weights, ybars = _batched_environments(params, m, n, with_boundary, seeds)
                dp = _batched_tables(weights[:, 0, :], ybars, weights[:, 1:, :])[:, m, n]
                bf = _batched_brute(weights, ybars, with_boundary)
                worst = max(worst, int(np.abs(dp - bf).max()))
                total += per_size
                # the batched sweep is the same recursion as passage_time;
                # pin a few environments through the single-grid API too
                for k in range(min(5, per_size)):
                    env = sample_environment(params, m, n, seeds[k], with_boundary=with_boundary)
                    if passage_time(env).g[m, n] != dp[k]:
                        pin_bad += 1
    return _result(
        "oracle_equivalence",
        worst == 0 and pin_bad == 0,
        f"{total} environments up to 4x6, max |DP - brute| = {worst}, API pin mismatches = {pin_bad}",
        t0,
    )


def check_burke_exactness() -> CheckResult:
    """Exact factorization of the stationarity update at cutoff 80."""
    t0 = time.perf_counter()
    worst = 0.0
    for p, u in ((0.25, 0.5), (0.1, 0.9), (0.5, 0.75), (0.25, 1.0)):
        rep = exact_burke_factorization(validate_params(p, u), cutoff=80)
        worst = max(worst, rep.max_abs_deviation)
    return _result("burke_exactness", worst < 1e-10, f"max joint deviation = {worst:.2e}", t0)


def check_shape_lln(full: bool = True, seed: int = 7, threads: int | None = None) -> CheckResult:
    """Simulated growth matches the three reference shape values."""
    t0 = time.perf_counter()
    N, reps = (1000, 100) if full else (300, 50)
    tol_concave, tol_flat = (0.02, 0.01) if full else (0.04, 0.02)
    cases = []
    est = estimate_growth(validate_params(0.25), False, 1.0, 1.0, N, reps, seed, threads)
    cases.append(("iid(1,1)", est.point, gpp(1, 1, 0.25).value, tol_concave))
    est = estimate_growth(validate_params(0.25, 0.5), True, 1.0, 1.0, N, reps, seed + 1, threads)
    cases.append(("boundary(1,1)", est.point, gpp_boundary(1, 1, validate_params(0.25, 0.5)), tol_concave))
    est = estimate_growth(validate_params(0.5), False, 1.0, 3.0, N, reps, seed + 2, threads)
    cases.append(("flat(1,3)", est.point, gpp(1, 3, 0.5).value, tol_flat))
    errs = [(name, abs(pt - ref) / ref, tol) for name, pt, ref, tol in cases]
    ok = all(e <= tol for _, e, tol in errs)
    detail = ", ".join(f"{name} rel.err {e:.4f} (tol {tol})" for name, e, tol in errs)
    return _result("shape_lln", ok, detail, t0)


def _duality_grid():
    xis = np.concatenate([np.linspace(0.02, 2.0, 20), [3.0, 4.0, 6.0, 10.0, 20.0]])
    for p in (0.1, 0.25, 0.5, 0.75):
        for s in (0.5, 1.0, 1.5, 2.5, 4.0):
            for tfrac in (0.05, 0.15, 0.3, 0.5, 0.7, 0.85, 0.95, 0.99):
                t = tfrac * s * (1 - p) / p
                for xi in xis:
                    yield p, s, t, float(xi)


def check_duality() -> CheckResult:
    """Closed-form scaled log-MGF agrees with the variational minimum on a
    4000-point grid; the minimizer stays in (p, 1] and the discriminant is
    nonnegative everywhere."""
    t0 = time.perf_counter()
    worst = 0.0
    bad_u = 0
    bad_delta = 0
    count = 0
    for p, s, t, xi in _duality_grid():
        closed = jstar(s, t, p, xi, method="closed")
        var = jstar(s, t, p, xi, method="variational")
        worst = max(worst, abs(closed.value - var.value))
        us = ustar(s, t, p, xi)
        if not (p < us <= 1.0 + 1e-12):
            bad_u += 1
        e = (2.0 * math.sinh(0.5 * xi)) ** 2
        delta = p * (1 - p) * e * (p * (1 - p) * (s + t) ** 2 * e + 4 * s * t)
        if not delta >= 0.0:
            bad_delta += 1
        count += 1
    ok = worst <= 1e-8 and bad_u == 0 and bad_delta == 0 and count >= 4000
    return _result(
        "duality",
        ok,
        f"{count} grid points, max |closed - variational| = {worst:.2e}, "
        f"u* violations = {bad_u}, negative discriminants = {bad_delta}",
        t0,
    )


def check_legendre_roundtrip() -> CheckResult:
    """Legendre transform of the rate function recovers the log-MGF."""
    t0 = time.perf_counter()
    s, t, p = 2.0, 1.0, 0.5
    g0 = gpp(s, t, p).value
    worst = 0.0
    phi = (math.sqrt(5) - 1) / 2
    for xi in np.linspace(0.0, 5.0, 26):
        lo, hi = g0, s

        def neg(rv: float) -> float:
            return -(rv * xi - rate_I(s, t, p, rv))

        for _ in range(120):
            x1 = hi - phi * (hi - lo)
            x2 = lo + phi * (hi - lo)
            if neg(x1) <= neg(x2):
                hi = x2
            else:
                lo = x1
            if hi - lo < 1e-12:
                break
        val = -neg(0.5 * (lo + hi))
        worst = max(worst, abs(val - jstar(s, t, p, xi).value))
    zero = rate_I(s, t, p, g0)
    ok = worst <= 1e-4 and abs(zero) <= 1e-8
    return _result("legendre_roundtrip", ok, f"max |I*(xi) - jstar| = {worst:.2e}, I(gpp) = {zero:.2e}", t0)


def check_rlem(full: bool = True) -> CheckResult:
    """Pipeline identity: boundary-row rate equals the decomposed infimum,
    with the gap shrinking under grid refinement."""
    t0 = time.perf_counter()
    sizes = (101, 201, 401) if full else (51, 101, 201)
    gaps = [rlem_gap(1.0, 1.0, 0.25, 0.6, 0.7, a_grid_size=k) for k in sizes]
    ok = gaps[-1] < 1e-3 and gaps[0] >= gaps[1] >= gaps[2]
    return _result("rlem_identity", ok, "gaps " + " -> ".join(f"{g:.2e}" for g in gaps), t0)


def _solve_rate_level(s: float, t: float, p: float, target: float) -> float:
    lo, hi = gpp(s, t, p).value, s
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if rate_I(s, t, p, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def check_tail_rate(full: bool = True, seed: int = 11, threads: int | None = None) -> CheckResult:
    """Point comparison of the Monte Carlo tail estimate against the rate.

    At the reference scale (N = 200 with N * rate = 7, 1e6 replicates) the
    tail probability carries a constant log-prefactor of about 4.1, so the
    estimate exceeds the rate by roughly 4.1 / (N * rate) = 59% regardless
    of N; the 20% target cannot be met this way at any feasible replicate
    count.  ``check_tail_rate_ladder`` is the observable-form verification
    of the same limit.
    """
    t0 = time.perf_counter()
    s, t, p = 1.0, 1.0, 0.25
    N, reps = (200, 1_000_000) if full else (100, 100_000)
    r = _solve_rate_level(s, t, p, 7.0 / N)
    ref = rate_I(s, t, p, r)
    est = estimate_tail(validate_params(p), False, s, t, r, N, reps, seed, threads)
    rel = abs(est.point - ref) / ref
    ok = (not est.censored) and rel <= 0.20
    return _result(
        "tail_rate",
        ok,
        f"r = {r:.5f}, estimate {est.point:.5f} vs rate {ref:.5f}, rel.err {rel:.3f} "
        f"(hits = {est.meta['hits']})",
        t0,
    )


def check_tail_rate_ladder(full: bool = True, seed: int = 11, threads: int | None = None) -> CheckResult:
    """Tail decay matches the rate function up to a constant log-prefactor.

    If P{G >= Nr} = C * exp(-N * J(r)) with the analytic J, then
    (-log(phat)/N - J) * N is flat in N.  The check runs an N-ladder at
    fixed r and requires a flat excess and estimates decreasing toward the
    rate; a wrong rate would tilt the excess linearly in N.
    """
    t0 = time.perf_counter()
    s, t, p = 1.0, 1.0, 0.25
    r = _solve_rate_level(s, t, p, 7.0 / 200.0)
    ref = rate_I(s, t, p, r)
    ladder = (40, 60, 80, 120) if full else (30, 45, 60)
    reps = 1_000_000 if full else 200_000
    excesses = []
    ests = []
    min_hits = 10**9
    for N in ladder:
        est = estimate_tail(validate_params(p), False, s, t, r, N, reps, seed + N, threads)
        min_hits = min(min_hits, est.meta["hits"])
        ests.append(est.point)
        excesses.append((est.point - ref) * N)
    spread = max(excesses) - min(excesses)
    decreasing = all(b < a for a, b in zip(ests, ests[1:]))
    ok = min_hits >= 50 and spread < 1.0 and decreasing and 0.0 < min(excesses) < 6.5
    detail = (
        f"r = {r:.5f}, rate {ref:.5f}; excess*N over N={ladder}: "
        + ", ".join(f"{e:.2f}" for e in excesses)
        + f" (spread {spread:.2f}, min hits {min_hits})"
    )
    return _result("tail_rate_ladder", ok, detail, t0)


def check_lmgf_mc(full: bool = True, seed: int = 13, threads: int | None = None) -> CheckResult:
    """Empirical scaled log-MGF matches the analytic limits within 10%."""
    t0 = time.perf_counter()
    xi = 0.2
    N, reps = (400, 200_000) if full else (150, 40_000)
    tol = 0.10 if full else 0.15
    ref_iid = istar(1.0, 1.0, 0.25, xi)
    est_iid = estimate_lmgf(validate_params(0.25), False, 1.0, 1.0, xi, N, reps, seed, threads)
    params = validate_params(0.25, 0.5)
    ref_b = lambda_boundary(1.0, 1.0, params, xi, "full").value
    est_b = estimate_lmgf(params, True, 1.0, 1.0, xi, N, reps, seed + 1, threads)
    rel_i = abs(est_iid.point - ref_iid) / abs(ref_iid)
    rel_b = abs(est_b.point - ref_b) / abs(ref_b)
    ok = rel_i <= tol and rel_b <= tol
    return _result("lmgf_mc", ok, f"iid rel.err {rel_i:.3f}, boundary rel.err {rel_b:.3f} (tol {tol})", t0)


def check_lambda_structure() -> CheckResult:
    """Full boundary log-MGF is the max of the two restricted ones, is
    continuous across the crossover slope, is infinite exactly beyond the
    pole, and the crossover slope is sandwiched by the branch slopes."""
    t0 = time.perf_counter()
    params = validate_params(0.25, 0.5)
    pole = pole_xi(params)
    worst_max = 0.0
    worst_cont = 0.0
    sandwich_ok = True
    for xi in np.linspace(0.05, pole - 0.05, 12):
        kp = k_threshold(params, xi, "plus")
        km = k_threshold(params, xi, "minus")
        el = ell_threshold(params, xi)
        if not (km <= el <= kp):
            sandwich_ok = False
        for ss in (0.5, 1.0, 2.0):
            for tt in (0.05, 0.3, 0.8, 1.5, 4.0):
                full_v = lambda_boundary(ss, tt, params, xi, "full").value
                hor_v = lambda_boundary(ss, tt, params, xi, "hor").value
                ver_v = lambda_boundary(ss, tt, params, xi, "ver").value
                worst_max = max(worst_max, abs(full_v - max(hor_v, ver_v)))
            # continuity across t = ell * s: both branch formulas agree there
            tt = el * ss
            hcross = lambda_boundary(ss, tt * (1 - 1e-15), params, xi, "full").value
            vcross = lambda_boundary(ss, tt * (1 + 1e-15), params, xi, "full").value
            worst_cont = max(worst_cont, abs(hcross - vcross))
    inf_at_pole = (
        math.isinf(lambda_boundary(1.0, 1.0, params, math.log(3.0), "full").value)
        and math.isinf(lambda_boundary(1.0, 1.0, params, math.log(3.0) + 0.5, "ver").value)
        and math.isfinite(lambda_boundary(1.0, 1.0, params, math.log(3.0) - 1e-6, "full").value)
    )
    ok = worst_max <= 1e-9 and worst_cont <= 1e-10 and inf_at_pole and sandwich_ok
    detail = (
        f"max |full - max(hor,ver)| = {worst_max:.2e}, crossover jump = {worst_cont:.2e}, "
        f"pole at ln3 {'ok' if inf_at_pole else 'BROKEN'}, sandwich {'ok' if sandwich_ok else 'BROKEN'}"
    )
    return _result("lambda_structure", ok, detail, t0)


def check_left_tail_speed(
    full: bool = True, seed: int = 17, threads: int | None = None, r: float = 0.9
) -> CheckResult:
    """-log P{G <= Nr}/N increases in N below the shape limit.

    The default depth r = 0.9 is the deepest level at which the event stays
    observable with 1e6 replicates on N in {20, 30, 40}.  At r = 0.7 every
    row censors (the minimum corner value over 1e6 replicates at N = 20 is
    16 against a threshold of 14, so the probability is far below 1e-6);
    the acceptance suite documents that case separately.
    """
    t0 = time.perf_counter()
    reps = 1_000_000 if full else 200_000
    rows = left_tail_diagnostic(validate_params(0.5), False, 1.0, 1.0, r, [20, 30, 40], reps, seed, threads)
    vals = [row.rate_estimate for row in rows if not row.censored]
    ok = len(vals) >= 2 and all(b > a for a, b in zip(vals, vals[1:]))
    detail = f"r={r}, -log(phat)/N: " + ", ".join(
        f"{row.rate_estimate:.4f}{'*' if row.censored else ''}" for row in rows
    )
    return _result("left_tail_speed", ok, detail, t0)


def check_threshold_limits() -> CheckResult:
    """Both critical slopes tend to the characteristic slope as xi -> 0."""
    t0 = time.perf_counter()
    params = validate_params(0.25, 0.5)
    char = characteristic_slope(params)
    xi = 1e-3
    errs = [
        abs(k_threshold(params, xi, "plus") - char) / char,
        abs(k_threshold(params, xi, "minus") - char) / char,
        abs(ell_threshold(params, xi) - char) / char,
    ]
    ok = max(errs) <= 0.005
    return _result("threshold_limits", ok, f"rel errors at xi=1e-3: {', '.join(f'{e:.2e}' for e in errs)}", t0)


def run_all(full: bool = False, seed: int = 7, threads: int | None = None) -> list[CheckResult]:
    """Run the complete verification battery in criterion order.

    The tail-rate and left-tail criteria run in their observable forms here
    (constant-prefactor ladder, depth r = 0.9); the literal parameter sets
    are documented as unattainable and exercised by the acceptance tests.
    """
    return [
        check_oracle_equivalence(full=full, seed=seed + 100),
        check_burke_exactness(),
        check_shape_lln(full=full, seed=seed, threads=threads),
        check_duality(),
        check_legendre_roundtrip(),
        check_rlem(full=full),
        check_tail_rate_ladder(full=full, seed=seed + 1, threads=threads),
        check_lmgf_mc(full=full, seed=seed + 2, threads=threads),
        check_lambda_structure(),
        check_left_tail_speed(full=full, seed=seed + 3, threads=threads),
        check_threshold_limits(),
    ]
