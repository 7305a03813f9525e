"""Revenue curves, ironing, virtual values, and monopoly pricing."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from myersonlab.curves import (
    NEG_INF,
    iron,
    ironed_virtual,
    ironing_intervals,
    monopoly,
    revenue_curve,
    virtual_table,
    RevenueCurve,
)
from myersonlab.dist import make_discrete, point_mass

from test_dist import TWO_POINT, value_dists


class TestNegInfSentinel:
    def test_ordering(self):
        assert NEG_INF < -1e300
        assert NEG_INF <= NEG_INF
        assert not NEG_INF < NEG_INF
        assert not (-1e300 < NEG_INF)
        assert NEG_INF == NEG_INF
        assert NEG_INF != 0.0

    def test_arithmetic_forbidden(self):
        with pytest.raises(TypeError):
            NEG_INF + 1.0
        with pytest.raises(TypeError):
            0.0 * NEG_INF


class TestRevenueCurve:
    def test_two_point(self):
        c = revenue_curve(TWO_POINT)
        assert c.breakpoints == ((0.0, 0.0), (0.1, 0.1), (1.0, 0.1))

    def test_point_mass(self):
        assert revenue_curve(point_mass(0.5)).breakpoints == ((0.0, 0.0), (1.0, 0.5))

    def test_uniform_thirds(self):
        c = revenue_curve(make_discrete([1 / 3, 2 / 3, 1.0], [1 / 3, 1 / 3, 1 / 3]))
        qs = [q for q, _ in c.breakpoints]
        rs = [r for _, r in c.breakpoints]
        assert qs == pytest.approx([0.0, 1 / 3, 2 / 3, 1.0], abs=1e-12)
        assert rs == pytest.approx([0.0, 1 / 3, 4 / 9, 1 / 3], abs=1e-12)

    def test_value_at_interpolates(self):
        c = revenue_curve(TWO_POINT)
        assert c.value_at(0.05) == pytest.approx(0.05, abs=1e-12)
        assert c.value_at(0.55) == pytest.approx(0.1, abs=1e-12)
        with pytest.raises(ValueError):
            c.value_at(1.0001)

    @given(value_dists())
    @settings(max_examples=80, deadline=None)
    def test_shape(self, d):
        c = revenue_curve(d)
        qs = [q for q, _ in c.breakpoints]
        assert c.breakpoints[0] == (0.0, 0.0)
        assert qs[-1] == 1.0
        assert all(a < b for a, b in zip(qs, qs[1:]))

    @given(value_dists())
    @settings(max_examples=80, deadline=None)
    def test_peak_is_monopoly_revenue(self, d):
        c = revenue_curve(d)
        _, rev = monopoly(d)
        assert max(r for _, r in c.breakpoints) == pytest.approx(rev, abs=1e-12)


class TestIron:
    def test_concave_input_unchanged(self):
        c = revenue_curve(TWO_POINT)
        assert iron(c).breakpoints == c.breakpoints

    def test_v_shape_hull(self):
        c = RevenueCurve(((0.0, 0.0), (0.5, 0.1), (1.0, 0.4)))
        assert iron(c).breakpoints == ((0.0, 0.0), (1.0, 0.4))

    @given(value_dists())
    @settings(max_examples=100, deadline=None)
    def test_envelope_properties(self, d):
        c = revenue_curve(d)
        h = iron(c)
        assert set(h.breakpoints) <= set(c.breakpoints)
        for q, r in c.breakpoints:
            assert h.value_at(q) >= r - 1e-12
        slopes = [
            (r1 - r0) / (q1 - q0)
            for (q0, r0), (q1, r1) in zip(h.breakpoints, h.breakpoints[1:])
        ]
        assert all(a >= b - 1e-12 for a, b in zip(slopes, slopes[1:]))
        assert iron(h).breakpoints == h.breakpoints


class TestIronedVirtual:
    def test_gadget_values(self):
        assert ironed_virtual(TWO_POINT, 1.0) == pytest.approx(1.0, abs=1e-12)
        assert ironed_virtual(TWO_POINT, 0.5) == pytest.approx(0.0, abs=1e-12)
        assert ironed_virtual(TWO_POINT, 0.1) == pytest.approx(0.0, abs=1e-12)
        assert ironed_virtual(TWO_POINT, 0.05) is NEG_INF

    def test_point_masses(self):
        assert ironed_virtual(point_mass(0.5), 0.5) == pytest.approx(0.5)
        assert ironed_virtual(point_mass(0.5), 0.9) == pytest.approx(0.5)
        assert ironed_virtual(point_mass(1.0), 1.0) == pytest.approx(1.0)

    @given(value_dists())
    @settings(max_examples=80, deadline=None)
    def test_step_function_shape(self, d):
        # nondecreasing in value, constant between consecutive support values
        grid = sorted(set(list(d.support) + [v + 1e-6 for v in d.support] + [0.0, 1.0]))
        vals = [ironed_virtual(d, v) for v in grid if 0 <= v <= 1]
        for a, b in zip(vals, vals[1:]):
            assert a <= b or a == pytest.approx(b, abs=1e-12)
        table = virtual_table(d)
        for v in d.support:
            assert table.at(v) == ironed_virtual(d, v)
        for lo, hi in zip(d.support, d.support[1:]):
            mid = 0.5 * (lo + hi)
            if mid < hi:
                assert ironed_virtual(d, mid) == ironed_virtual(d, lo)

    @given(value_dists())
    @settings(max_examples=60, deadline=None)
    def test_regular_matches_raw_right_derivative(self, d):
        if ironing_intervals(d):
            return
        raw = revenue_curve(d)
        from myersonlab.dist import quantile_of_value

        for v in d.support:
            q = quantile_of_value(d, v)
            assert ironed_virtual(d, v) == pytest.approx(raw.right_slope_at(q), abs=1e-12)


class TestIroningIntervals:
    def test_concave_has_none(self):
        assert ironing_intervals(TWO_POINT) == []

    def test_sagging_middle_breakpoint(self):
        # breakpoints (0,0), (0.1,0.1), (0.2,0.1), (1,0.4): the middle one
        # sags below the chord, so the hull spans (0.1, 1)
        d = make_discrete([0.4, 0.5, 1.0], [0.8, 0.1, 0.1])
        ivs = ironing_intervals(d)
        assert len(ivs) == 1
        assert ivs[0] == pytest.approx((0.1, 1.0), abs=1e-12)


class TestMonopoly:
    def test_tie_prefers_larger_price(self):
        assert monopoly(TWO_POINT) == (1.0, pytest.approx(0.1, abs=1e-12))

    def test_point_mass(self):
        assert monopoly(point_mass(0.5)) == (0.5, 0.5)

    def test_uniform_thirds(self):
        price, rev = monopoly(make_discrete([1 / 3, 2 / 3, 1.0], [1 / 3, 1 / 3, 1 / 3]))
        assert price == pytest.approx(2 / 3)
        assert rev == pytest.approx(4 / 9)
