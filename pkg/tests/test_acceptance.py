"""Acceptance gate: one test per criterion, each printing a PASS line with
its runtime.  Tolerances are pinned here and nowhere else.

Run with `pytest tests/test_acceptance.py -v -s`.
"""

import math
import os
import time

import numpy as np
import pytest

from orlicz_na import OrliczBall, YoungFunction, properize
from orlicz_na.cli import main as cli_main
from orlicz_na.concentration import domination_check, empirical_tail, isotropize
from orlicz_na.quadrature import QuadratureSpec, integrate_quadrant
from orlicz_na.randomgen import (
    random_ball,
    random_degenerate_ball,
    random_radius_fn,
)
from orlicz_na.samplers import (
    RadialDensity,
    sample_hit_and_run,
    sample_lp,
    sample_rejection,
)
from orlicz_na.sets import CSet, MonotoneFn, RadiusFn
from orlicz_na.suites import run_suite
from orlicz_na.verify import (
    ProperMeasure,
    ThetaInstance,
    bm_four_point_check,
    covariance_jackknife,
    four_term_check,
    moment_compare,
    na_covariance_test,
    theta_ratio,
)


class _Timer:
    def __init__(self, label, budget):
        self.label, self.budget = label, budget

    def __enter__(self):
        self.t0 = time.time()
        return self

    def __exit__(self, *exc):
        self.dt = time.time() - self.t0
        if exc[0] is None:
            print(f"\nACCEPTANCE {self.label}: PASS ({self.dt:.1f}s / budget {self.budget}s)")
            assert self.dt < self.budget, f"{self.label} exceeded runtime budget"
        else:
            print(f"\nACCEPTANCE {self.label}: FAIL after {time.time() - self.t0:.1f}s")
        return False


def test_01_independence_baseline():
    with _Timer("1 independence baseline (cube)", 10):
        for n in (2, 3):
            K = OrliczBall([YoungFunction.flat_then_inf(1.0)] * n)
            A = CSet(np.array([[0.4]]))
            B = CSet(np.array([[0.7] * (n - 1)]))
            r = four_term_check(K, A, [0], B, list(range(1, n)),
                                spec=QuadratureSpec(96, 2))
            assert abs(r.margin) <= 1e-9, r.margin
        K2 = OrliczBall([YoungFunction.flat_then_inf(1.0)] * 2)
        batch = sample_rejection(K2, 10 ** 6, 101)
        f = MonotoneFn("polynomial", terms=[(1.0, (1.0,))])
        r = na_covariance_test(batch, f, [0], f, [1])
        assert abs(r.extras["cov"]) <= 4 * r.extras["se"]


def test_02_exact_l1_oracle():
    with _Timer("2 exact l1 covariance oracle", 30):
        K = OrliczBall([YoungFunction.power(1.0)] * 2)
        spec = QuadratureSpec(1024, 2)
        vol = integrate_quadrant(K, spec=spec)
        mxy = integrate_quadrant(K, weight=lambda p: p[:, 0] * p[:, 1], spec=spec)
        mx = integrate_quadrant(K, weight=lambda p: p[:, 0], spec=spec)
        my = integrate_quadrant(K, weight=lambda p: p[:, 1], spec=spec)
        e_xy = mxy.value / vol.value
        e_x = mx.value / vol.value
        e_y = my.value / vol.value
        assert abs(e_xy - 1 / 12) <= 1e-6
        assert abs(e_x - 1 / 3) <= 1e-6
        cov_q = e_xy - e_x * e_y
        assert abs(cov_q - (-1 / 36)) <= 1e-6
        batch = sample_rejection(K, 10 ** 6, 102, quadrant=False)
        u = np.abs(batch.points[:, 0])
        v = np.abs(batch.points[:, 1])
        cov_mc, se = covariance_jackknife(u, v)
        assert abs(cov_mc - (-1 / 36)) <= 4 * se


def test_03_four_term_suite():
    with _Timer("3 four-term inequality, 500 instances", 300):
        rows = run_suite("na", 500, seed=303, nodes=64)
        fails = [r for _, _, r in rows if r.verdict == "fail"]
        assert not fails, fails[:3]


def test_04_bm_four_point_suite():
    with _Timer("4 BM four-point, 500 instances", 120):
        rows = run_suite("bm", 500, seed=304, nodes=48)
        fails = [r for _, _, r in rows if r.verdict == "fail"]
        assert not fails, fails[:3]
        K = OrliczBall([YoungFunction.power(1.0)] * 3)
        r = bm_four_point_check(K, 0, 1, 0.2, 0.2, 0.1, 0.5)
        assert r.margin == 0.0


def test_05_theta_monotonicity_suite():
    with _Timer("5 theta monotonicity + slab ratios, 100 instances", 180):
        rows = run_suite("theta", 100, seed=305, nodes=64, grid=64)
        fails = [r for _, _, r in rows if r.verdict == "fail"]
        assert not fails, fails[:3]


def test_06_dominance_suite():
    with _Timer("6 set-ratio dominance, 200 instances", 300):
        rows = run_suite("main", 200, seed=306, nodes=64)
        fails = [r for _, _, r in rows if r.verdict == "fail"]
        assert not fails, fails[:3]


def test_07_lp_inequalities_suite():
    with _Timer("7 lp radial/cone inequalities", 120):
        rows = run_suite("lp", 48, seed=307, nodes=64)
        fails = [r for _, _, r in rows if r.verdict == "fail"]
        assert not fails, fails[:3]
        cross = [r for cid, _, r in rows if "logconcave-cross" in r.check_id]
        assert len(cross) == 48
        # the exponential-density cases factorize exactly
        exp_rows = [r for k, r in enumerate(cross) if (k // 3) % 2 == 1]
        assert all(abs(r.margin) <= 1e-12 for r in exp_rows)


def test_08_moment_comparison():
    with _Timer("8 moment comparison", 180):
        K = OrliczBall([YoungFunction.power(1.0)] * 2)
        r2 = moment_compare(K, [1.0, -1.5], 2, spec=QuadratureSpec(256, 2))
        assert abs(r2.margin) <= 1e-9
        r4 = moment_compare(K, [1.0, 1.0], 4, spec=QuadratureSpec(1024, 2))
        assert abs(r4.extras["lhs"] - 0.2) <= 1e-6
        assert abs(r4.extras["rhs"] - 0.3) <= 1e-6
        rows = run_suite("moments", 50, seed=308, nodes=64)
        fails = [r for _, _, r in rows if r.verdict == "fail"]
        assert not fails, fails[:3]


def _grid_covariance_oracle(p, m=256):
    """Cov(|x1 - x2|, x3) under uniform on the quadrant of the p-ball, by a
    brute-force m^3 midpoint grid."""
    mids = (np.arange(m) + 0.5) / m
    mp = mids ** p
    s_uv = s_u = s_v = s_1 = 0.0
    Y, Z = np.meshgrid(mids, mids, indexing="ij")
    YZp = mp[:, None] + mp[None, :]
    for x1, x1p in zip(mids, mp):
        mask = x1p + YZp <= 1.0
        if not mask.any():
            continue
        u = np.abs(x1 - Y)[mask]
        v = Z[mask]
        s_uv += float(np.sum(u * v))
        s_u += float(np.sum(u))
        s_v += float(np.sum(v))
        s_1 += float(mask.sum())
    return s_uv / s_1 - (s_u / s_1) * (s_v / s_1)


def test_09_lp_radius_na():
    with _Timer("9 lp radius-wise negative association", 600):
        N = 10 ** 6
        fails = []
        for kind in ("indicator", "exp"):
            for p in (1.0, 2.0):
                for n in (3, 4, 8):
                    dens = RadialDensity(kind, p=p)
                    seed = 9000 + int(p) * 100 + n + (0 if kind == "indicator" else 50)
                    batch = sample_lp(n, dens, N, seed)
                    rng = np.random.default_rng(seed + 1)
                    for pair in range(20):
                        k = int(rng.integers(1, n))
                        axes = list(rng.permutation(n))
                        I, J = sorted(axes[:k]), sorted(axes[k:])
                        f = random_radius_fn(rng, len(I))
                        g = random_radius_fn(rng, len(J))
                        r = na_covariance_test(batch, f, I, g, J)
                        if r.verdict == "fail":
                            fails.append((kind, p, n, pair, r.extras))
        assert not fails, fails[:3]
        # brute-force grid oracle for the n=3 indicator case
        dens = RadialDensity("indicator", p=2.0)
        batch = sample_lp(3, dens, N, 9999)
        X = np.abs(batch.points)
        u = np.abs(X[:, 0] - X[:, 1])
        v = X[:, 2]
        cov_mc, _ = covariance_jackknife(u, v)
        cov_grid = _grid_covariance_oracle(2.0, 256)
        assert abs(cov_mc - cov_grid) <= 1e-3
        assert cov_grid <= 0.0   # the theorem's sign at oracle precision


def test_10_concentration_domination():
    with _Timer("10 concentration tail domination", 600):
        t_grid = np.arange(0, 21) * 0.05
        cases = []
        for n in (16, 64):
            cases.append(OrliczBall([YoungFunction.flat_then_inf(0.5)] * n))
            cases.append(random_ball(n, 1000 + n, proper=True))
            cases.append(random_ball(n, 2000 + n))
        for k, K in enumerate(cases):
            ball, rep = isotropize(K, sample_budget=0)
            try:
                batch = sample_rejection(ball, 10 ** 5, 500 + k)
            except RuntimeError:
                batch = sample_hit_and_run(ball, 10 ** 5, 500 + k, burn_in=1000)
            curve = empirical_tail(batch, rep.L2, t_grid)
            res = domination_check(curve)
            assert res.verdict == "pass", (k, K.n, res.extras)


def test_11_restriction_exactness():
    from orlicz_na.young import EmptyBall, restrict_hyperplane, restrict_interval

    with _Timer("11 restriction membership exactness", 60):
        bad = 0
        checked = 0
        for seed in range(100):
            rng = np.random.default_rng(11000 + seed)
            n = int(rng.choice([2, 3]))
            K = random_ball(n, rng)
            if seed % 2 == 0:
                i = int(rng.integers(0, n))
                R = float(K.radii[i])
                xa = float(rng.uniform(0, 0.6 * R))
                xb = xa + float(rng.uniform(0.05 * R, 0.8 * R))
                Kp = restrict_interval(K, i, (xa, xb))
                if isinstance(Kp, EmptyBall):
                    continue
                pts = rng.uniform(0, 1, size=(10 ** 4, n)) * K.box
                pts[:, i] = rng.uniform(xa, xb, size=10 ** 4)
                mapped = pts.copy()
                mapped[:, i] -= xa
            else:
                i, j = rng.choice(n, size=2, replace=False)
                lam = float(rng.uniform(0, 2.0))
                c = float(rng.uniform(0, 0.5 * K.radii[i]))
                Kp = restrict_hyperplane(K, int(i), int(j), lam, c)
                if isinstance(Kp, EmptyBall):
                    continue
                m = 10 ** 4
                ts = rng.uniform(0, 1, size=m) * K.radii[j]
                pts = np.zeros((m, n))
                pts[:, i] = lam * ts + c
                pts[:, j] = ts
                cols = [ts]
                for a in range(n):
                    if a in (int(i), int(j)):
                        continue
                    vals = rng.uniform(0, 1, size=m) * K.radii[a]
                    pts[:, a] = vals
                    cols.append(vals)
                mapped = np.column_stack(cols)
            res = K.residual(pts)
            resp = Kp.residual(mapped)
            keep = (np.abs(res - 1) > 1e-12) & (np.abs(resp - 1) > 1e-12)
            bad += int(np.sum((res[keep] <= 1) != (resp[keep] <= 1)))
            checked += int(keep.sum())
        assert checked > 5 * 10 ** 5
        assert bad == 0


def test_12_properize_deficit():
    with _Timer("12 properize volume deficit", 120):
        for eps in (0.1, 0.01):
            for k in range(20):
                K = random_degenerate_ball(2 if k % 2 == 0 else 3, 12000 + k)
                Kp = properize(K, eps)
                assert all(f.is_proper for f in Kp.young)
                batch = sample_rejection(K, 10 ** 5, 600 + k)
                inside = Kp.residual(batch.points) <= 1.0
                deficit = 1.0 - float(inside.mean())
                se = math.sqrt(max(deficit * (1 - deficit), 1e-9) / len(batch))
                assert deficit <= eps + 3 * se, (eps, k, deficit)
                rng = np.random.default_rng(700 + k)
                pts = rng.uniform(0, 1.2, size=(10 ** 4, K.n)) * K.box
                inK = K.membership(pts)
                inKp = Kp.membership(pts)
                assert not np.any(inKp & ~inK)


def test_13_reproducibility(tmp_path):
    with _Timer("13 byte-identical outputs", 120):
        texts = {}
        for tag, workers in (("a", 1), ("b", 1), ("c", 4)):
            out = str(tmp_path / tag)
            code = cli_main(["verify", "--suite", "na", "--count", "6",
                             "--seed", "13", "--nodes", "32",
                             "--workers", str(workers), "--out", out])
            assert code == 0
            texts[tag] = open(os.path.join(out, "verify_na.csv"), "rb").read()
        assert texts["a"] == texts["b"] == texts["c"]
        conc = {}
        for tag in ("a", "b"):
            out = str(tmp_path / ("c" + tag))
            code = cli_main(["concentration", "--cube", "8", "--N", "20000",
                             "--seed", "13", "--out", out])
            assert code == 0
            conc[tag] = open(os.path.join(out, "tails.csv"), "rb").read()
        assert conc["a"] == conc["b"]
