"""Shape functions: worked values, homogeneity, concavity, domination."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bernlpp import (
    MissingBoundaryParamError,
    OutOfRangeError,
    characteristic_direction,
    gpp,
    gpp_boundary,
    gpp_restricted,
    minimize_scalarized,
    translate_first_passage,
    validate_params,
    variational_gpp,
)

PB = validate_params(0.25, 0.5)


class TestGpp:
    def test_square_at_quarter(self):
        res = gpp(1, 1, 0.25)
        assert res.value == pytest.approx(math.sqrt(3) / 2, abs=1e-12)
        assert res.branch == "strict_concave"

    def test_flat_edge(self):
        res = gpp(1, 3, 0.5)
        assert res.value == 1.0
        assert res.branch == "flat_edge"

    def test_horizontal_axis(self):
        assert gpp(1, 0, 0.25).value == pytest.approx(0.25, abs=1e-15)

    def test_branch_boundary(self):
        p = 0.25
        for s, t in [(1.0, 2.9), (1.0, 3.0), (1.0, 3.1)]:
            expected = "flat_edge" if t >= s * (1 - p) / p else "strict_concave"
            assert gpp(s, t, p).branch == expected

    def test_rejects_origin_and_bad_p(self):
        with pytest.raises(OutOfRangeError):
            gpp(0, 0, 0.25)
        with pytest.raises(OutOfRangeError):
            gpp(1, 1, 1.0)

    @given(
        s=st.floats(0.01, 10), t=st.floats(0.01, 10), c=st.floats(0.01, 20),
        p=st.sampled_from([0.1, 0.25, 0.5, 0.75]),
    )
    def test_homogeneous(self, s, t, c, p):
        assert gpp(c * s, c * t, p).value == pytest.approx(c * gpp(s, t, p).value, rel=1e-12)

    def test_concave_along_segments(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            p = rng.choice([0.1, 0.25, 0.5, 0.75])
            a = rng.uniform(0.01, 5, size=2)
            b = rng.uniform(0.01, 5, size=2)
            mid = 0.5 * (a + b)
            lhs = gpp(*mid, p).value
            rhs = 0.5 * (gpp(*a, p).value + gpp(*b, p).value)
            assert lhs >= rhs - 1e-10

    def test_asymmetric_in_the_two_axes(self):
        # only horizontal steps collect weight, so swapping the axes changes
        # the limit (g <= s always, with no such bound in t)
        assert gpp(2, 1, 0.25).value != pytest.approx(gpp(1, 2, 0.25).value, abs=1e-6)
        assert gpp(1, 2, 0.25).value <= 1.0


class TestGppBoundary:
    def test_worked_value(self):
        assert gpp_boundary(1, 1, PB) == pytest.approx(1.0, abs=1e-15)

    def test_horizontal_axis(self):
        assert gpp_boundary(2.5, 0, PB) == pytest.approx(2.5 * 0.5, abs=1e-15)

    def test_degenerate_u(self):
        assert gpp_boundary(1.5, 7.0, validate_params(0.25, 1.0)) == pytest.approx(1.5, abs=1e-15)

    def test_requires_u(self):
        with pytest.raises(MissingBoundaryParamError):
            gpp_boundary(1, 1, validate_params(0.25))

    def test_dominates_iid_shape(self):
        for p in (0.1, 0.25, 0.6):
            for s in (0.5, 1.0, 2.0):
                for t in (0.1, 0.8, 3.0):
                    base = gpp(s, t, p).value
                    for u in np.linspace(p + 1e-3, 1.0, 25):
                        assert gpp_boundary(s, t, validate_params(p, u)) >= base - 1e-12

    def test_touches_at_closed_form_minimizer(self):
        for p in (0.1, 0.25, 0.6):
            for s in (0.5, 1.0, 2.0):
                for t in (0.1, 0.8):
                    ustar = min(p + math.sqrt(t * p * (1 - p) / s), 1.0)
                    val = gpp_boundary(s, t, validate_params(p, ustar))
                    assert val == pytest.approx(gpp(s, t, p).value, abs=1e-9)


class TestCharacteristicDirection:
    def test_worked_value(self):
        assert characteristic_direction(PB) == pytest.approx((1.0, 1.0 / 3.0), abs=1e-15)

    def test_half_with_full_boundary(self):
        assert characteristic_direction(validate_params(0.5, 1.0))[1] == pytest.approx(1.0, abs=1e-15)

    def test_slope_vanishes_as_u_drops_to_p(self):
        assert characteristic_direction(validate_params(0.25, 0.2500001))[1] < 1e-12


class TestGppRestricted:
    def test_agree_on_characteristic_line(self):
        for p, u in [(0.25, 0.5), (0.1, 0.4), (0.5, 0.9)]:
            pr = validate_params(p, u)
            slope = characteristic_direction(pr)[1]
            s = 1.3
            t = slope * s
            h = gpp_restricted(s, t, pr, "e1")
            v = gpp_restricted(s, t, pr, "e2")
            assert h == pytest.approx(v, abs=1e-9)
            assert h == pytest.approx(gpp(s, t, p).value, abs=1e-9)
            assert h == pytest.approx(gpp_boundary(s, t, pr), abs=1e-9)

    def test_boundary_branch_below_line(self):
        assert gpp_restricted(1.0, 0.1, PB, "e1") == pytest.approx(gpp_boundary(1.0, 0.1, PB), abs=1e-15)
        assert gpp_restricted(1.0, 0.1, PB, "e2") == pytest.approx(gpp(1.0, 0.1, 0.25).value, abs=1e-15)

    def test_max_is_boundary_shape(self):
        for t in (0.05, 0.3, 1.0, 4.0):
            h = gpp_restricted(1.0, t, PB, "e1")
            v = gpp_restricted(1.0, t, PB, "e2")
            assert max(h, v) == pytest.approx(gpp_boundary(1.0, t, PB), abs=1e-12)


class TestMinimizeScalarized:
    def test_shape_objective(self):
        p = 0.25
        res = minimize_scalarized(lambda v: v, lambda v: p * (1 - v) / (v - p), 1.0, 1.0, (p, 1.0))
        assert res.argmin == pytest.approx(0.6830127018922193, abs=1e-6)
        assert res.value == pytest.approx(math.sqrt(3) / 2, abs=1e-10)
        assert not res.at_boundary

    def test_open_left_end_when_t_zero(self):
        # with the decreasing part switched off the objective is increasing,
        # so the infimum sits at the open left end of the interval
        p = 0.25
        res = minimize_scalarized(lambda v: v, lambda v: p * (1 - v) / (v - p), 1.0, 0.0, (p, 1.0))
        assert not res.at_boundary
        assert res.argmin == pytest.approx(p, abs=1e-6)
        assert res.value == pytest.approx(p, abs=1e-6)

    def test_boundary_case_above_critical_slope(self):
        # s*h + t*g decreasing on the whole interval once t is large enough
        p = 0.25
        res = minimize_scalarized(lambda v: v, lambda v: p * (1 - v) / (v - p), 1.0, 10.0, (p, 1.0))
        assert res.at_boundary and res.argmin == 1.0


class TestVariationalGpp:
    def test_matches_closed_form(self):
        res = variational_gpp(1, 1, 0.25)
        assert res.value == pytest.approx(math.sqrt(3) / 2, abs=1e-9)
        assert res.minimizer_u == pytest.approx(0.6830127018922193, abs=1e-12)

    def test_flat_edge_minimizer_is_one(self):
        res = variational_gpp(1, 3, 0.5)
        assert res.minimizer_u == 1.0
        assert res.value == pytest.approx(1.0, abs=1e-10)
        assert res.branch == "flat_edge"

    def test_equals_gpp_on_grid(self):
        for p in (0.15, 0.4):
            for s in (0.5, 1.5):
                for t in (0.2, 1.0, 5.0):
                    assert variational_gpp(s, t, p).value == pytest.approx(
                        gpp(s, t, p).value, abs=1e-9
                    )


class TestTranslateFirstPassage:
    def test_no_collected_sites(self):
        assert translate_first_passage(0, 1, 0, 0, 5, 3) == 5

    def test_all_cheap_steps(self):
        assert translate_first_passage(5, 1, 0, 0, 5, 3) == 0

    def test_worked_value(self):
        assert translate_first_passage(2, 3, 1, 0.5, 4, 2) == pytest.approx(9.0, abs=1e-15)

    def test_rejects_bad_costs(self):
        with pytest.raises(OutOfRangeError):
            translate_first_passage(1, 1, 1, 0, 2, 2)
