"""Isotropic normalization and the maximal-inequality tail bounds."""

import math

import numpy as np
import pytest

from orlicz_na import OrliczBall, YoungFunction
from orlicz_na.concentration import (
    default_truncation,
    domination_check,
    empirical_tail,
    isotropize,
    moment_comparability_check,
    orlicz_tail_bound,
    shao_maximal_bound,
    wilson_interval,
)
from orlicz_na.randomgen import random_ball
from orlicz_na.samplers import sample_hit_and_run, sample_rejection


class TestShaoBound:
    def test_worked_example(self):
        v = shao_maximal_bound(2.0, 1.0, 0.5, 1.0, 0.1)
        expect = 0.2 + 4 * math.exp(-(4 * 0.5) / (2 * 3) * (1 + (2 / 3) * math.log(3)))
        assert v == pytest.approx(expect, rel=1e-12)
        assert v == pytest.approx(2.4453, abs=5e-4)

    def test_vacuous_above_one(self):
        v = shao_maximal_bound(0.1, 0.1, 0.5, 10.0, 0.5)
        assert v >= 1.0   # probability bound above 1 carries no content

    def test_large_variance_limit(self):
        # B_n -> inf sends the exponential argument to 0: bound -> 2 tail + 4
        v = shao_maximal_bound(2.0, 1.0, 0.5, 1e12, 0.1)
        assert v == pytest.approx(0.2 + 4.0, rel=1e-6)

    def test_range_validation(self):
        with pytest.raises(ValueError):
            shao_maximal_bound(-1.0, 1.0, 0.5, 1.0, 0.1)
        with pytest.raises(ValueError):
            shao_maximal_bound(1.0, 1.0, 1.5, 1.0, 0.1)

    def test_duplicate_arithmetic_oracle(self):
        """The specialized bound equals the general one at alpha = 1/2,
        x = n t, B_n = 5 n L2^2 (independent arithmetic route)."""
        rng = np.random.default_rng(5)
        for _ in range(50):
            n = int(rng.integers(4, 128))
            L2 = float(rng.uniform(0.05, 0.5))
            t = float(rng.uniform(0.01, 2.0))
            tail = float(rng.uniform(0.0, 0.3))
            a = default_truncation(n, t)
            direct = orlicz_tail_bound(n, L2, t, tail)
            via_general = min(shao_maximal_bound(n * t, a, 0.5, 5 * n * L2 * L2, tail), 1.0)
            assert direct == pytest.approx(via_general, rel=1e-12)

    def test_bound_monotone_in_t(self):
        ts = np.linspace(0.05, 2.0, 40)
        vals = [orlicz_tail_bound(64, 1 / 12, float(t), 0.0) for t in ts]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


class TestIsotropize:
    def test_cube_side_one(self):
        K = OrliczBall([YoungFunction.flat_then_inf(0.5)] * 4)
        ball, rep = isotropize(K, sample_budget=20000, seed=1)
        assert rep.L2 == pytest.approx(1 / 12, rel=1e-6)
        assert rep.volume_estimate == pytest.approx(1.0, abs=rep.volume_ci)

    def test_l1_moments_equalized(self, l1_2d):
        ball, rep = isotropize(l1_2d, sample_budget=50000, seed=2)
        assert rep.residual_spread < 0.05

    def test_anisotropic_box_ratio(self):
        K = OrliczBall([YoungFunction.flat_then_inf(1.0),
                        YoungFunction.flat_then_inf(2.0)])
        ball, rep = isotropize(K, sample_budget=20000, seed=3)
        assert rep.scale[0] / rep.scale[1] == pytest.approx(2.0, rel=0.02)

    def test_random_ball_normalization(self):
        K = random_ball(3, 12345)
        ball, rep = isotropize(K, sample_budget=30000, seed=4)
        assert rep.volume_estimate == pytest.approx(1.0, abs=max(rep.volume_ci, 1e-3))
        assert rep.residual_spread < 0.1


class TestEmpiricalTail:
    def test_t_zero_is_one(self, l1_2d):
        ball, rep = isotropize(l1_2d, sample_budget=0)
        b = sample_rejection(ball, 20000, 5)
        curve = empirical_tail(b, rep.L2, [0.0])
        assert curve.empirical[0] == 1.0
        assert curve.bound[0] == 1.0

    def test_beyond_max_deviation_zero(self, l1_2d):
        ball, rep = isotropize(l1_2d, sample_budget=0)
        b = sample_rejection(ball, 20000, 6)
        big = float(np.abs((b.points ** 2).mean(axis=1) - rep.L2).max()) + 1.0
        curve = empirical_tail(b, rep.L2, [big])
        assert curve.empirical[0] == 0.0
        assert curve.ci_hi[0] < 0.001

    def test_monotone_in_t(self, l1_2d):
        ball, rep = isotropize(l1_2d, sample_budget=0)
        b = sample_rejection(ball, 30000, 7)
        curve = empirical_tail(b, rep.L2, np.arange(0, 11) * 0.05)
        assert np.all(np.diff(curve.empirical) <= 1e-12)

    def test_wilson_basic(self):
        lo, hi = wilson_interval(50, 100)
        assert lo < 0.5 < hi
        assert wilson_interval(0, 100)[0] == 0.0


class TestDomination:
    @pytest.mark.parametrize("n", [16, 32])
    def test_cube_domination(self, n):
        K = OrliczBall([YoungFunction.flat_then_inf(0.5)] * n)
        ball, rep = isotropize(K, sample_budget=0)
        b = sample_hit_and_run(ball, 30000, 8, burn_in=300, quadrant=False)
        curve = empirical_tail(b, rep.L2, np.arange(0, 21) * 0.05)
        assert domination_check(curve).verdict == "pass"

    def test_fourth_moment_sanity(self, l1_2d):
        ball, rep = isotropize(l1_2d, sample_budget=0)
        b = sample_rejection(ball, 50000, 9)
        r = moment_comparability_check(b, rep.L2)
        assert r.verdict == "pass"
