"""Monte Carlo engine: determinism, cross-engine pinning, and estimators."""

import math
from dataclasses import asdict

import numpy as np
import pytest

from bernlpp import (
    OutOfRangeError,
    corner_passage_time,
    estimate_growth,
    estimate_lmgf,
    estimate_tail,
    exact_law,
    gpp_boundary,
    left_tail_diagnostic,
    sample_environment,
    simulate_corners,
    validate_params,
)
from bernlpp.rng import replicate_seed

PI = validate_params(0.25)
PB = validate_params(0.25, 0.5)


class TestDeterminism:
    def test_bit_identical_estimates(self):
        a = estimate_growth(PB, True, 1.0, 1.0, 64, 50, master_seed=42)
        b = estimate_growth(PB, True, 1.0, 1.0, 64, 50, master_seed=42)
        assert asdict(a) == asdict(b)

    def test_thread_count_invariance(self):
        a = simulate_corners(PI, False, 1.0, 1.0, 64, 400, master_seed=1, threads=1)
        b = simulate_corners(PI, False, 1.0, 1.0, 64, 400, master_seed=1, threads=2)
        assert np.array_equal(a, b)

    def test_kernel_matches_lattice_dp(self):
        # replicate k of the kernel regenerates exactly the grid that
        # sample_environment produces from the replicate seed
        for wb, params in ((False, PI), (True, PB)):
            g = simulate_corners(params, wb, 1.0, 0.8, 40, 16, master_seed=7)
            for rep in range(16):
                env = sample_environment(params, 40, 32, replicate_seed(7, rep), with_boundary=wb)
                assert corner_passage_time(env) == g[rep]

    def test_degenerate_u_kernel(self):
        pr = validate_params(0.25, 1.0)
        g = simulate_corners(pr, True, 1.0, 1.0, 30, 8, master_seed=3)
        assert (g == 30).all()  # all-ones axis row forces g = m


class TestEstimateGrowth:
    def test_scaling_consistency(self):
        # the boundary model has bias-free means, so doubling N must agree
        # within the combined confidence intervals
        a = estimate_growth(PB, True, 1.0, 1.0, 250, 100, master_seed=5)
        b = estimate_growth(PB, True, 1.0, 1.0, 500, 100, master_seed=6)
        assert abs(a.point - b.point) < a.half_width_95 + b.half_width_95

    def test_boundary_mean_is_exact(self):
        est = estimate_growth(PB, True, 1.0, 1.0, 200, 400, master_seed=8)
        expect = gpp_boundary(1.0, 1.0, PB)
        assert abs(est.point - expect) < 3 * est.half_width_95 / 1.96 * 2

    def test_rejects_tiny_runs(self):
        with pytest.raises(OutOfRangeError):
            estimate_growth(PI, False, 1.0, 1.0, 100, 1, master_seed=0)
        with pytest.raises(OutOfRangeError):
            estimate_growth(PI, False, 0.001, 1.0, 100, 10, master_seed=0)


class TestEstimateTail:
    def test_small_instance_exactness(self):
        # converges to the enumerated law on a 4x4 instance
        law = exact_law(PI, 4, 4)
        reps = 10_000_000
        est = estimate_tail(PI, False, 1.0, 1.0, 0.75, 4, reps, master_seed=21)
        phat = est.meta["hits"] / reps
        pexact = law.tail_geq(3.0)
        se = math.sqrt(pexact * (1 - pexact) / reps)
        assert abs(phat - pexact) < 4 * se

    def test_impossible_event_is_censored(self):
        est = estimate_tail(PI, False, 1.0, 1.0, 1.5, 50, 2000, master_seed=2)
        assert est.censored and est.meta["hits"] == 0
        assert est.half_width_95 == math.inf

    def test_lln_side_rate_vanishes(self):
        est = estimate_tail(PI, False, 1.0, 1.0, 0.5, 100, 4000, master_seed=3)
        assert est.point == pytest.approx(0.0, abs=1e-3)


class TestEstimateLmgf:
    def test_zero_tilt_exact(self):
        est = estimate_lmgf(PI, False, 1.0, 1.0, 0.0, 50, 400, master_seed=4)
        assert est.point == 0.0

    def test_batch_interval_positive(self):
        est = estimate_lmgf(PI, False, 1.0, 1.0, 0.2, 100, 4000, master_seed=5)
        assert est.half_width_95 > 0


class TestLeftTail:
    def test_feasible_scale_trend(self):
        # the reference-scale variant runs in the acceptance suite; at the
        # threshold 0.9 the event is observable and the speed shows through
        rows = left_tail_diagnostic(validate_params(0.5), False, 1.0, 1.0, 0.9, [20, 30, 40], 200_000, 31)
        vals = [r.rate_estimate for r in rows if not r.censored]
        assert len(vals) >= 2
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_boundary_variant_requires_characteristic_direction(self):
        with pytest.raises(OutOfRangeError):
            left_tail_diagnostic(PB, True, 1.0, 1.0, 0.3, [10], 100, 0)

    def test_boundary_variant_runs_on_characteristic_line(self):
        slope = (0.5 - 0.25) ** 2 / (0.25 * 0.75)
        rows = left_tail_diagnostic(PB, True, 3.0, 3.0 * slope, 0.4, [10, 14], 20_000, 12)
        assert len(rows) == 2

    def test_rejects_r_at_or_above_limit(self):
        with pytest.raises(OutOfRangeError):
            left_tail_diagnostic(PI, False, 1.0, 1.0, 0.9, [10], 100, 0)
