"""Environments, the passage-time recursion, and the exact oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bernlpp import (
    MissingBoundaryParamError,
    OutOfRangeError,
    TooLargeError,
    brute_force_passage,
    burke_step,
    corner_passage_time,
    env_from_json,
    env_to_json,
    exact_law,
    increment_fields,
    passage_time,
    restricted_passage_time,
    sample_environment,
    simulate_corners,
    validate_params,
)
from bernlpp.lattice import EnvironmentGrid, default_y_cutoff
from bernlpp.params import geometric_mean

PB = validate_params(0.25, 0.5)
PI = validate_params(0.25)


class TestSampling:
    def test_deterministic(self):
        a = sample_environment(PB, 40, 30, 777, with_boundary=True)
        b = sample_environment(PB, 40, 30, 777, with_boundary=True)
        assert np.array_equal(a.weights, b.weights)
        assert np.array_equal(a.boundary_y, b.boundary_y)

    def test_requires_u(self):
        with pytest.raises(MissingBoundaryParamError):
            sample_environment(PI, 4, 4, 0, with_boundary=True)

    def test_bulk_mean(self):
        env = sample_environment(PI, 400, 400, 5)
        n = env.weights.size
        assert abs(env.weights.mean() - 0.25) < 3 * math.sqrt(0.25 * 0.75 / n)

    def test_boundary_means(self):
        env = sample_environment(PB, 2000, 2000, 9, with_boundary=True)
        u, rho = 0.5, 2.0 / 3.0
        se_x = math.sqrt(u * (1 - u) / 2000)
        assert abs(env.boundary_x.mean() - u) < 3 * se_x
        mean_y = geometric_mean(rho)  # 0.5
        se_y = math.sqrt((1 - rho) / rho**2 / 2000)
        assert abs(env.boundary_y.mean() - mean_y) < 3 * se_y

    def test_degenerate_u(self):
        env = sample_environment(validate_params(0.25, 1.0), 10, 10, 3, with_boundary=True)
        assert (env.boundary_x == 1).all()
        assert (env.boundary_y == 0).all()

    def test_json_roundtrip(self):
        env = sample_environment(PB, 5, 7, 11, with_boundary=True)
        back = env_from_json(env_to_json(env))
        assert back.m == env.m and back.n == env.n and back.seed == env.seed
        assert np.array_equal(back.weights, env.weights)
        assert np.array_equal(back.boundary_y, env.boundary_y)


class TestPassageTime:
    def test_all_ones_no_boundary(self):
        w = np.ones((3, 2), dtype=np.int64)
        env = EnvironmentGrid(m=2, n=2, weights=w, boundary_y=None, seed=0)
        assert passage_time(env).g[2, 2] == 2

    def test_all_zeros(self):
        w = np.zeros((3, 2), dtype=np.int64)
        env = EnvironmentGrid(m=2, n=2, weights=w, boundary_y=None, seed=0)
        assert passage_time(env).g[2, 2] == 0

    def test_matches_brute_force(self):
        for seed in range(250):
            for wb in (False, True):
                env = sample_environment(PB, 3, 3, seed, with_boundary=wb)
                assert passage_time(env).g[3, 3] == brute_force_passage(env)

    def test_matches_brute_force_rectangular(self):
        for seed in range(120):
            env = sample_environment(PB, 4, 6, seed, with_boundary=(seed % 2 == 0))
            assert passage_time(env).g[4, 6] == brute_force_passage(env)

    def test_corner_equals_full_table(self):
        for seed in range(40):
            env = sample_environment(PB, 7, 5, seed, with_boundary=True)
            assert corner_passage_time(env) == passage_time(env).g[7, 5]

    def test_monotone_along_axes(self):
        env = sample_environment(PB, 8, 8, 1, with_boundary=True)
        g = passage_time(env).g
        assert (np.diff(g, axis=0) >= 0).all()
        assert (np.diff(g, axis=1) >= 0).all()

    @given(seed=st.integers(0, 10_000), m=st.integers(1, 5), n=st.integers(1, 5))
    @settings(max_examples=60, deadline=None)
    def test_support_bound_no_boundary(self, seed, m, n):
        env = sample_environment(PI, m, n, seed)
        g = passage_time(env).g
        assert 0 <= g[m, n] <= m

    def test_superadditive_under_concatenation(self):
        rng = np.random.default_rng(42)
        for _ in range(60):
            m, n, m2, n2 = rng.integers(1, 5, size=4)
            wa = rng.integers(0, 2, size=(n + 1, m)).astype(np.int64)
            wb = rng.integers(0, 2, size=(n2 + 1, m2)).astype(np.int64)
            big = np.zeros((n + n2 + 1, m + m2), dtype=np.int64)
            big[: n + 1, :m] = wa
            big[n:, m:] = wb  # block B sits at offset (m, n); its axis row lands on row n
            env_a = EnvironmentGrid(m=int(m), n=int(n), weights=wa, boundary_y=None, seed=0)
            env_b = EnvironmentGrid(m=int(m2), n=int(n2), weights=wb, boundary_y=None, seed=0)
            env_c = EnvironmentGrid(m=int(m + m2), n=int(n + n2), weights=big, boundary_y=None, seed=0)
            ga = passage_time(env_a).g[m, n]
            gb = passage_time(env_b).g[m2, n2]
            gc = passage_time(env_c).g[m + m2, n + n2]
            assert gc >= ga + gb


def _bulk_passage_from(env, i0, j0):
    """Independent implementation: best path from (i0, j0), collecting at
    e1 arrival sites only (used to rebuild the two first-step branches)."""
    m, n = env.m, env.n
    g = np.full((m + 1, n + 1), -(10**9), dtype=np.int64)
    g[i0, j0] = 0
    for j in range(j0, n + 1):
        for i in range(i0, m + 1):
            best = g[i, j]
            if j > j0:
                best = max(best, g[i, j - 1])
            if i > i0:
                best = max(best, g[i - 1, j] + env.weights[j, i - 1])
            g[i, j] = best
    return g[m, n]


class TestRestricted:
    def test_requires_boundary(self):
        env = sample_environment(PI, 3, 3, 0)
        with pytest.raises(MissingBoundaryParamError):
            restricted_passage_time(env, "e1")

    def test_max_of_restrictions_is_corner(self):
        for seed in range(150):
            env = sample_environment(PB, 4, 5, seed, with_boundary=True)
            h = restricted_passage_time(env, "e1")
            v = restricted_passage_time(env, "e2")
            assert max(h, v) == corner_passage_time(env)

    def test_against_direct_branch_formulas(self):
        # first-step decomposition rebuilt literally: exit along an axis,
        # then a bulk-only passage; the vertical branch scores the weight of
        # the entering horizontal step
        for seed in range(25):
            env = sample_environment(PB, 3, 4, seed, with_boundary=True)
            xcum = np.cumsum(env.boundary_x)
            ycum = np.cumsum(env.boundary_y)
            hor = max(xcum[k - 1] + _bulk_passage_from(env, k, 1) for k in range(1, env.m + 1))
            ver = max(
                ycum[k - 1] + env.weights[k, 0] + _bulk_passage_from(env, 1, k)
                for k in range(1, env.n + 1)
            )
            assert restricted_passage_time(env, "e1") == hor
            assert restricted_passage_time(env, "e2") == ver

    def test_one_by_one(self):
        env = sample_environment(PB, 1, 1, 5, with_boundary=True)
        assert restricted_passage_time(env, "e1") == env.boundary_x[0]
        assert restricted_passage_time(env, "e2") == env.boundary_y[0] + env.bulk[0, 0]


class TestIncrements:
    def test_shapes_and_telescoping(self):
        env = sample_environment(PB, 6, 7, 3, with_boundary=True)
        field = passage_time(env)
        I, J = increment_fields(field)
        assert I.shape == (6, 8) and J.shape == (7, 7)
        for j in range(8):
            assert I[:, j].sum() == field.g[6, j] - field.g[0, j]

    def test_axis_row_identity(self):
        env = sample_environment(PB, 6, 7, 3, with_boundary=True)
        I, _ = increment_fields(passage_time(env))
        assert np.array_equal(I[:, 0], env.boundary_x)

    def test_boundary_increments_stay_binary(self):
        # stationarity keeps every horizontal increment a 0/1 variable
        for seed in range(30):
            env = sample_environment(PB, 9, 8, seed, with_boundary=True)
            I, J = increment_fields(passage_time(env))
            assert np.isin(I, (0, 1)).all()
            assert (J >= 0).all()

    def test_all_zero_env(self):
        w = np.zeros((4, 3), dtype=np.int64)
        env = EnvironmentGrid(m=3, n=3, weights=w, boundary_y=None, seed=0)
        I, J = increment_fields(passage_time(env))
        assert not I.any() and not J.any()


class TestBurkeStep:
    @pytest.mark.parametrize(
        "args,expect",
        [((1, 0, 0), (1, 0, 0)), ((0, 2, 1), (1, 3, 0)), ((1, 1, 1), (1, 1, 1))],
    )
    def test_worked_examples(self, args, expect):
        assert tuple(burke_step(*args)) == expect

    @given(i=st.integers(0, 1), j=st.integers(0, 40), w=st.integers(0, 1))
    def test_ranges(self, i, j, w):
        tri = burke_step(i, j, w)
        assert tri.i_new in (0, 1) and tri.alpha in (0, 1) and tri.j_new >= 0

    def test_rejects_bad_input(self):
        with pytest.raises(OutOfRangeError):
            burke_step(2, 0, 0)
        with pytest.raises(OutOfRangeError):
            burke_step(0, -1, 0)


class TestBruteForce:
    def test_hand_checked_two_by_two(self):
        # weights at (1,1) and (2,2) only; the up-right-up-right path takes both
        w = np.zeros((3, 2), dtype=np.int64)
        w[1, 0] = 1  # site (1,1)
        w[2, 1] = 1  # site (2,2)
        env = EnvironmentGrid(m=2, n=2, weights=w, boundary_y=None, seed=0)
        assert brute_force_passage(env) == 2

    def test_budget(self):
        env = sample_environment(PI, 14, 14, 0)
        with pytest.raises(TooLargeError):
            brute_force_passage(env)


class TestExactLaw:
    def test_two_by_two_support_and_mass(self):
        law = exact_law(validate_params(0.5), 2, 2)
        assert set(law.values.tolist()) == {0, 1, 2}
        assert law.probs.sum() == pytest.approx(1.0, abs=1e-12)
        assert law.truncation_mass == 0.0

    def test_boundary_mass_and_exact_mean(self):
        law = exact_law(PB, 2, 2, with_boundary=True)
        assert law.probs.sum() == pytest.approx(1.0, abs=1e-9)
        # stationary increments make the finite-size mean exactly m*u + n*E[J]
        assert law.mean() == pytest.approx(2 * 0.5 + 2 * 0.5, abs=1e-8)

    def test_mc_cross_check(self):
        law = exact_law(PI, 4, 4)
        g = simulate_corners(PI, False, 1.0, 1.0, 4, 200_000, master_seed=3)
        se = g.std(ddof=1) / math.sqrt(g.size)
        assert abs(g.mean() - law.mean()) < 3 * se

    def test_budget(self):
        with pytest.raises(TooLargeError):
            exact_law(PI, 5, 5)
        with pytest.raises(TooLargeError):
            exact_law(PB, 3, 3, with_boundary=True)

    def test_default_cutoff(self):
        k = default_y_cutoff(2.0 / 3.0)
        assert (1.0 / 3.0) ** (k + 1) < 1e-12 <= (1.0 / 3.0) ** k
