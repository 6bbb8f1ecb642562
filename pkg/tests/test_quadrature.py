"""Deterministic integration oracle and the 1-D comparison utilities."""

import math

import numpy as np
import pytest

from orlicz_na import OrliczBall, YoungFunction
from orlicz_na.quadrature import (
    QuadratureSpec,
    axis_moment,
    all_axis_moments,
    budget_volume,
    integrate_quadrant,
    pairing_check,
    ratio_compare,
    section_measure,
)
from orlicz_na.randomgen import random_ball
from orlicz_na.sets import CSet

SPEC = QuadratureSpec(nodes=256, levels=2)


class TestIntegrateQuadrant:
    def test_triangle_area(self, l1_2d):
        r = integrate_quadrant(l1_2d, spec=SPEC)
        assert r.value == pytest.approx(0.5, abs=1e-10)

    def test_quarter_disc(self, l2_2d):
        r = integrate_quadrant(l2_2d, spec=SPEC)
        assert r.value == pytest.approx(math.pi / 4, abs=3 * r.error_estimate + 1e-9)

    def test_xy_weight(self, l1_2d):
        r = integrate_quadrant(l1_2d, weight=lambda p: p[:, 0] * p[:, 1], spec=SPEC)
        assert r.value == pytest.approx(1 / 24, abs=1e-7)

    def test_rejects_high_dimension(self):
        K = OrliczBall([YoungFunction.power(1.0)] * 5)
        with pytest.raises(ValueError, match="sampler"):
            integrate_quadrant(K, spec=SPEC)

    def test_midpoint_rule_agrees(self, l2_2d):
        clip = integrate_quadrant(l2_2d, spec=QuadratureSpec(256, 2, "clip"))
        mid = integrate_quadrant(l2_2d, spec=QuadratureSpec(256, 2, "midpoint"))
        assert mid.value == pytest.approx(clip.value,
                                          abs=3 * (mid.error_estimate + clip.error_estimate))

    def test_refinement_consistency(self):
        """Doubling nodes moves any reported value by <= 4x its error estimate."""
        for seed in range(6):
            K = random_ball(2, seed)
            a = integrate_quadrant(K, spec=QuadratureSpec(64, 2))
            b = integrate_quadrant(K, spec=QuadratureSpec(128, 2))
            assert abs(a.value - b.value) <= 4 * a.error_estimate + 1e-12

    def test_additivity(self, l2_2d):
        """Region plus complement equals the whole, within combined errors."""
        A = CSet(np.array([[0.6, 0.3], [0.2, 0.9]]))
        ra = integrate_quadrant(l2_2d, region=A, spec=SPEC)
        rc = integrate_quadrant(l2_2d, region=("complement", A), spec=SPEC)
        rall = integrate_quadrant(l2_2d, spec=SPEC)
        combined = ra.error_estimate + rc.error_estimate + rall.error_estimate
        assert ra.value + rc.value == pytest.approx(rall.value, abs=2 * combined + 1e-12)

    def test_node_floor_enforced(self):
        with pytest.raises(ValueError):
            QuadratureSpec(nodes=4)


class TestSectionMeasure:
    def test_l1_section(self, l1_3d):
        r = section_measure(l1_3d, {0: 0.5}, spec=SPEC)
        assert r.value == pytest.approx(0.125, abs=1e-10)

    def test_degenerate_section(self, l1_2d):
        r = section_measure(l1_2d, {0: 1.0}, spec=SPEC)
        assert r.value == pytest.approx(0.0, abs=1e-12)

    def test_l2_section(self, l2_3d):
        r = section_measure(l2_3d, {0: 0.6}, spec=SPEC)
        assert r.value == pytest.approx(math.pi * 0.64 / 4,
                                        abs=3 * r.error_estimate + 1e-9)

    def test_empty_section_zero(self, l1_2d):
        r = section_measure(l1_2d, {0: 2.0}, spec=SPEC)
        assert r.value == 0.0


class TestRatioCompare:
    def test_decreasing_ratio_passes(self):
        rep = ratio_compare(lambda x: 1 - x, lambda x: np.ones_like(x), None,
                            (0.0, 0.5), (0.5, 1.0))
        assert rep.verdict == "pass"
        assert rep.lhs == pytest.approx(0.75, abs=1e-9)
        assert rep.rhs == pytest.approx(0.25, abs=1e-9)
        assert rep.fact_chain_ok

    def test_equal_functions_tie(self):
        rep = ratio_compare(lambda x: 2 * x + 1, lambda x: 2 * x + 1, None,
                            (0.0, 0.5), (0.5, 1.0))
        assert rep.verdict == "pass"
        assert rep.lhs == pytest.approx(1.0) and rep.rhs == pytest.approx(1.0)

    def test_negative_control_increasing_ratio(self):
        rep = ratio_compare(lambda x: x, lambda x: np.ones_like(x), None,
                            (0.0, 0.5), (0.5, 1.0))
        assert rep.verdict == "fail"

    def test_undefined_denominator(self):
        zero = lambda x: np.zeros_like(x)
        rep = ratio_compare(lambda x: 1 - x, zero, None, (0.0, 0.5), (0.5, 1.0))
        assert rep.verdict == "undefined"


class TestPairingCheck:
    def test_exponential_example(self):
        rep = pairing_check(lambda x: np.exp(-x), lambda x: np.ones_like(x),
                            lambda x: x, lambda x: np.ones_like(x), None, (0.0, 1.0))
        assert rep.verdict == "pass"
        assert rep.lhs == pytest.approx(1 - 2 / math.e, abs=1e-7)
        assert rep.rhs == pytest.approx((1 - 1 / math.e) * 0.5, abs=1e-7)

    def test_symmetric_equality(self):
        p = lambda x: np.exp(-x)
        rep = pairing_check(p, p, lambda x: x, lambda x: np.ones_like(x), None,
                            (0.0, 1.0))
        assert rep.verdict == "pass"
        assert rep.margin == pytest.approx(0.0, abs=1e-14)

    def test_randomized_monotone_ratio_suite(self):
        rng = np.random.default_rng(12)
        fails = 0
        for _ in range(200):
            a, b, c = rng.uniform(0.2, 2.0, size=3)
            lo = float(rng.uniform(0, 0.5))
            hi = lo + float(rng.uniform(0.2, 1.0))
            rep = pairing_check(
                lambda x: np.exp(-a * x), lambda x: np.ones_like(x),
                lambda x: x ** b, lambda x: np.ones_like(x),
                lambda x: 1 + c * x, (lo, hi))
            fails += rep.verdict == "fail"
        assert fails == 0


class TestBudgetVolume:
    def test_matches_quadrature(self):
        for seed in range(5):
            K = random_ball(3, seed)
            qv = integrate_quadrant(K, spec=QuadratureSpec(96, 2))
            bv = budget_volume(K, bins=8192)
            tol = 3 * (qv.error_estimate + bv.error_estimate) + 1e-9
            assert bv.value == pytest.approx(qv.value, abs=tol)

    def test_simplex_any_dimension(self):
        K = OrliczBall([YoungFunction.power(1.0)] * 6)
        bv = budget_volume(K, bins=8192)
        assert bv.value == pytest.approx(1 / 720, rel=2e-3)

    def test_axis_moment(self, l1_2d):
        m = axis_moment(l1_2d, 0, 2.0)
        assert m.value == pytest.approx(1 / 12, rel=1e-3)

    def test_all_axis_moments_match_single(self):
        K = random_ball(4, 9)
        vals, errs = all_axis_moments(K, 2.0)
        for i in range(4):
            single = axis_moment(K, i, 2.0)
            assert vals[i] == pytest.approx(single.value, rel=1e-9)
