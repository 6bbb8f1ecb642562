#!/usr/bin/env python3
"""Benchmark: compiled kernel core vs the pure-numpy fallback.

Times the four hot paths (batch Young evaluation, ball residuals, inverse
lookups, hit-and-run chain advance) on representative workloads and prints a
speedup table.  Correctness equivalence lives in tests/test_kernels.py; this
script is about throughput only.

Usage: python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from orlicz_na._kernels import get_impl
from orlicz_na.randomgen import random_ball


def _time(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(quick=False):
    try:
        compiled = get_impl("compiled")
    except ImportError:
        print("compiled kernel not built; nothing to compare")
        return
    fallback = get_impl("fallback")
    scale = 10 if quick else 1
    rng = np.random.default_rng(0)

    rows = []

    K2 = random_ball(2, 1)
    pts2 = rng.uniform(0, 1, size=(2_000_000 // scale, 2)) * K2.box
    rows.append(("residual n=2, 2e6 pts",
                 _time(lambda: fallback.residual(K2.code, pts2)),
                 _time(lambda: compiled.residual(K2.code, pts2))))

    K64 = random_ball(64, 2)
    pts64 = rng.uniform(0, 1, size=(100_000 // scale, 64)) * K64.box
    rows.append(("residual n=64, 1e5 pts",
                 _time(lambda: fallback.residual(K64.code, pts64)),
                 _time(lambda: compiled.residual(K64.code, pts64))))

    xs = rng.uniform(0, float(K2.box[0]), size=2_000_000 // scale)
    rows.append(("eval_axis 2e6 pts",
                 _time(lambda: fallback.eval_axis(K2.code, 0, xs)),
                 _time(lambda: compiled.eval_axis(K2.code, 0, xs))))

    budgets = rng.uniform(0, 1, size=500_000 // scale)
    rows.append(("finv_axis 5e5 budgets",
                 _time(lambda: fallback.finv_axis(K2.code, 0, budgets)),
                 _time(lambda: compiled.finv_axis(K2.code, 0, budgets))))

    for n, steps in ((8, 20_000), (64, 5_000)):
        Kn = random_ball(n, n)
        C = 8
        S = steps // scale
        start = np.tile(Kn.box / (2 * n), (C, 1))
        dirs = rng.standard_normal((S, C, n))
        us = rng.uniform(size=(S, C))
        rows.append((f"hit-and-run n={n}, {S}x{C} steps",
                     _time(lambda: fallback.hnr_chains(Kn.code, start, dirs, us, Kn.box), 1),
                     _time(lambda: compiled.hnr_chains(Kn.code, start, dirs, us, Kn.box), 1)))

    print(f"{'workload':35s} {'fallback':>10s} {'compiled':>10s} {'speedup':>8s}")
    for name, tf, tc in rows:
        print(f"{name:35s} {tf * 1e3:9.1f}ms {tc * 1e3:9.1f}ms {tf / tc:7.1f}x")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    bench(ap.parse_args().quick)
