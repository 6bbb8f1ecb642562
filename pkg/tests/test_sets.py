"""c-sets, stair sets, box algebra, and the test-function families."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orlicz_na.sets import (
    CSet,
    MonotoneFn,
    RadiusFn,
    StairSet,
    cset_boxes,
    cset_membership,
    eval_monotone,
    product_boxes,
    random_cset,
    stair_approximate,
)


class TestCSet:
    def test_single_corner(self):
        A = CSet(np.array([[1.0, 1.0]]))
        assert cset_membership(A, [0.5, 0.5])

    def test_two_corners_neither_dominates(self):
        A = CSet(np.array([[1.0, 0.2], [0.3, 1.0]]))
        assert not cset_membership(A, [0.6, 0.6])

    def test_two_corners_second_dominates(self):
        A = CSet(np.array([[1.0, 0.2], [0.3, 1.0]]))
        assert cset_membership(A, [0.2, 0.9])

    def test_random_cset_deterministic(self):
        a = random_cset(2, 1, [1, 1], seed=7)
        b = random_cset(2, 1, [1, 1], seed=7)
        assert np.array_equal(a.corners, b.corners)

    def test_random_cset_brute_force(self, rng):
        A = random_cset(2, 2, [1, 1], seed=3)
        pts = rng.uniform(0, 1.2, size=(1000, 2))
        brute = np.zeros(1000, dtype=bool)
        for c in A.corners:
            brute |= np.all(pts <= c, axis=1)
        assert np.array_equal(A.membership(pts), brute)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_down_closed(self, seed):
        rng = np.random.default_rng(seed)
        A = random_cset(3, 5, [1, 1, 1], seed=seed)
        x = rng.uniform(0, 1, size=(200, 3))
        member = A.membership(x)
        y = x * rng.uniform(0, 1, size=(200, 3))   # y <= x coordinate-wise
        assert np.all(A.membership(y)[member])


class TestStairSet:
    def test_box_is_one_step(self):
        A = CSet(np.array([[1.0, 1.0]]))
        S = stair_approximate(A, 4)
        assert np.all(S.heights[S.xs <= 1.0 - 1e-12] == 1.0)

    def test_quarter_disc_heights(self):
        # c-set sampled from the quarter disc boundary; resolution 2 steps/unit
        ts = np.linspace(0, 1, 2001)
        A = CSet(np.column_stack([ts, np.sqrt(1 - ts ** 2)]))
        S = stair_approximate(A, 2)
        assert S.heights[0] == pytest.approx(1.0, abs=1e-3)
        assert S.heights[1] == pytest.approx(math.sqrt(0.75), abs=1e-3)

    def test_superset_and_nesting(self, rng):
        A = random_cset(2, 4, [1, 1], seed=5)
        S2 = stair_approximate(A, 2)
        S4 = stair_approximate(A, 4)
        pts = rng.uniform(0, 1.2, size=(3000, 2))
        inA = A.membership(pts)
        in2 = S2.membership(pts)
        in4 = S4.membership(pts)
        assert np.all(in2[inA]) and np.all(in4[inA])   # A inside both
        assert np.all(in2[in4])                         # finer inside coarser
        xe = float(A.corners[:, 0].max()) + 1.0
        assert S2.area(xe) >= S4.area(xe) >= 0

    def test_monotone_heights_required(self):
        with pytest.raises(ValueError):
            StairSet(np.array([0.0, 1.0]), np.array([0.5, 1.0]))


class TestBoxAlgebra:
    def test_partition_of_box(self, rng):
        hi = np.array([1.0, 1.0])
        A = random_cset(2, 3, hi, seed=11)
        inside = cset_boxes(A, hi)
        outside = cset_boxes(A, hi, complement=True)
        vol = sum(float(np.prod(h - l)) for l, h in inside + outside)
        assert vol == pytest.approx(1.0, rel=1e-12)
        pts = rng.uniform(0, 1, size=(2000, 2))
        cover = np.zeros(2000, dtype=int)
        in_flag = np.zeros(2000, dtype=bool)
        for lo, h in inside:
            m = np.all((pts >= lo) & (pts < h), axis=1)
            cover += m
            in_flag |= m
        for lo, h in outside:
            cover += np.all((pts >= lo) & (pts < h), axis=1)
        assert np.all(cover == 1)
        assert np.array_equal(in_flag, A.membership(pts))

    def test_product_boxes(self):
        hi = np.array([1.0, 2.0, 3.0])
        bi = [(np.array([0.0]), np.array([0.5]))]
        bj = [(np.array([0.0]), np.array([1.0])), (np.array([1.0]), np.array([2.0]))]
        out = product_boxes([([0], bi), ([2], bj)], 3, hi)
        assert len(out) == 2
        lo, h = out[0]
        assert lo[1] == 0.0 and h[1] == 2.0  # untouched axis spans the full range


class TestMonotoneFamilies:
    def test_polynomial_example(self):
        f = MonotoneFn("polynomial", terms=[(2.0, (1.0, 0.0)), (3.0, (0.0, 2.0))])
        assert eval_monotone(f, [1.0, 1.0]) == 5.0

    def test_complement_indicator_outside(self):
        f = MonotoneFn("complement_indicator", cset=CSet(np.array([[1.0, 1.0]])))
        assert eval_monotone(f, [1.5, 0.0]) == 1.0

    def test_abs_linear_homogeneity(self):
        f = RadiusFn("abs_linear", a=np.array([1.0, -1.0]))
        v1 = eval_monotone(f, [0.2, 0.7])
        v2 = eval_monotone(f, [0.4, 1.4])
        assert v1 == pytest.approx(0.5, abs=1e-15)
        assert v2 >= v1

    def test_monotone_probes(self):
        from orlicz_na.randomgen import random_monotone_fn
        rng = np.random.default_rng(1)
        for _ in range(8):
            k = int(rng.integers(1, 4))
            f = random_monotone_fn(rng, k)
            x = rng.uniform(0, 1.5, size=(10 ** 4, k))
            y = x + rng.uniform(0, 1.0, size=(10 ** 4, k))
            assert np.all(f(y) - f(x) >= -1e-12), f.kind

    def test_radius_probes(self):
        from orlicz_na.randomgen import random_radius_fn
        rng = np.random.default_rng(2)
        for _ in range(8):
            k = int(rng.integers(1, 4))
            f = random_radius_fn(rng, k)
            x = rng.uniform(0, 1.5, size=(10 ** 4, k))
            t = rng.uniform(1.0, 10.0, size=(10 ** 4, 1))
            assert np.all(f(t * x) - f(x) >= -1e-12), f.kind

    def test_abs_linear_not_coordinatewise(self):
        """|x1 - x2| is radius-wise but not coordinate-wise increasing: the
        admissible class for the lp result is strictly larger."""
        f = RadiusFn("abs_linear", a=np.array([1.0, -1.0]))
        lo = eval_monotone(f, [0.0, 0.5])
        hi = eval_monotone(f, [0.5, 0.5])   # coordinate-wise larger point
        assert hi < lo
