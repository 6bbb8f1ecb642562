"""Randomized verification suites behind `orlicz-na verify`.

Each suite maps an instance index to a CheckResult through a pure function of
(base seed, index), so rows are reproducible and can be fanned out across
worker processes with a deterministic, input-ordered reduction.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .quadrature import QuadratureSpec
from .randomgen import (
    random_ball,
    random_block_cset,
    random_log_concave_weight,
    random_proper_measure,
    random_radius_set,
    random_theta_instance,
)
from .samplers import RadialDensity
from .verify import (
    CheckResult,
    ProperMeasure,
    bm_four_point_check,
    four_term_check,
    lp_section_inequalities,
    moment_compare,
    slab_ratio_check,
    theta_dominance_check,
    theta_monotonicity_check,
)
from .quadrature import pairing_check, ratio_compare

SUITES = ("na", "theta", "bm", "lp", "lemmas", "main", "moments")


def instance_hash(desc) -> str:
    return hashlib.sha1(json.dumps(desc, sort_keys=True, default=str).encode()).hexdigest()[:12]


def _split_axes(rng, n: int):
    k = int(rng.integers(1, n))
    axes = list(rng.permutation(n))
    return sorted(axes[:k]), sorted(axes[k:])


def _suite_key(suite: str) -> int:
    # stable across processes (unlike hash(), which is salted per process)
    return int(hashlib.sha1(suite.encode()).hexdigest()[:4], 16)


def run_instance(suite: str, idx: int, seed: int, nodes: int, grid: int = 16) -> list:
    """One suite instance -> list of (check_id, hash, CheckResult)."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_suite_key(suite), idx)))
    if suite == "na":
        n = int(rng.choice([2, 3]))
        K = random_ball(n, rng)
        axes_I, axes_J = _split_axes(rng, n)
        A = random_block_cset(rng, K.radii[axes_I])
        B = random_block_cset(rng, K.radii[axes_J])
        spec = QuadratureSpec(nodes, 2)
        r = four_term_check(K, A, axes_I, B, axes_J, spec=spec,
                            check_id=f"na/{idx}")
        h = instance_hash({"n": n, "I": axes_I, "J": axes_J,
                           "A": A.corners.tolist(), "B": B.corners.tolist()})
        return [(r.check_id, h, r)]
    if suite == "theta":
        n = int(rng.choice([2, 3]))
        K = random_ball(n, rng)
        inst = random_theta_instance(K, rng)
        mu = random_proper_measure(inst.domain, rng)
        out = []
        if inst.domain.n >= 2:
            inner = [int(rng.integers(0, inst.domain.n))]
            r = theta_monotonicity_check(inst, mu, inner, grid=grid,
                                         spec=QuadratureSpec(max(nodes // 2, 16), 2),
                                         check_id=f"theta-mono/{idx}")
            out.append((r.check_id, instance_hash({"i": idx, "kind": inst.kind}), r))
        z_axis = int(rng.integers(0, n))
        rest = [a for a in range(n) if a != z_axis]
        A = random_block_cset(rng, K.radii[rest])
        if n - 1 <= 2:
            r2 = slab_ratio_check(K, z_axis, A, None, grid=grid,
                                  spec=QuadratureSpec(max(nodes // 2, 16), 2),
                                  check_id=f"theta-slab/{idx}")
            out.append((r2.check_id, instance_hash({"i": idx, "z": z_axis}), r2))
        return out
    if suite == "bm":
        n = int(rng.choice([3, 4]))
        K = random_ball(n, rng)
        ax_x, ax_y = sorted(rng.choice(n, size=2, replace=False).tolist())
        Rx, Ry = float(K.radii[ax_x]), float(K.radii[ax_y])
        x1, x2 = np.sort(rng.uniform(0.0, 0.95 * Rx, 2))
        y1, y2 = np.sort(rng.uniform(0.0, 0.95 * Ry, 2))
        nu = random_log_concave_weight(rng, n - 2)
        r = bm_four_point_check(K, ax_x, ax_y, float(x1), float(x2), float(y1), float(y2),
                                nu, spec=QuadratureSpec(nodes, 2), check_id=f"bm/{idx}")
        h = instance_hash({"n": n, "sec": [float(x1), float(x2), float(y1), float(y2)]})
        return [(r.check_id, h, r)]
    if suite == "lp":
        p = float((1.0, 2.0, 3.0)[idx % 3])
        kind = ("indicator", "exp")[(idx // 3) % 2]
        dens = RadialDensity(kind, p=p)
        n = 3
        k = int(rng.integers(1, 3))
        A = random_radius_set(rng, k)
        B = random_radius_set(rng, n - k)
        rows = lp_section_inequalities(p, n, k, dens, A, B, grid=16)
        h = instance_hash({"p": p, "kind": kind, "k": k, "i": idx})
        return [(f"{r.check_id}/{idx}", h, r) for r in rows]
    if suite == "lemmas":
        # monotone-ratio instances for the 1-D comparison utilities
        a = float(rng.uniform(0.2, 2.0))
        b = float(rng.uniform(0.2, 2.0))
        lo = float(rng.uniform(0.0, 0.3))
        mid = lo + float(rng.uniform(0.1, 0.5))
        hi2 = mid + float(rng.uniform(0.1, 0.5))

        def g(x):
            return np.exp(b * x)

        def f(x):
            return np.exp(b * x) * np.exp(-a * x)

        def w(x):
            return 1.0 + 0.5 * np.sin(3.0 * x) ** 2

        r1 = ratio_compare(f, g, w, (lo, mid), (mid, hi2))
        r1c = CheckResult(f"lemma-ratio/{idx}",
                          r1.margin if r1.margin is not None else 0.0, r1.tol,
                          r1.verdict if r1.verdict != "undefined" else "vacuous",
                          {"chain": r1.fact_chain_ok})
        c = float(rng.uniform(0.2, 2.0))
        r2 = pairing_check(lambda x: np.exp(-c * x), lambda x: np.ones_like(x),
                           lambda x: x ** a, lambda x: np.ones_like(x), w, (lo, hi2))
        r2c = CheckResult(f"lemma-pairing/{idx}", r2.margin, r2.tol, r2.verdict, {})
        h = instance_hash({"a": a, "b": b, "c": c, "I": [lo, mid, hi2]})
        out = [(r1c.check_id, h, r1c), (r2c.check_id, h, r2c)]
        if not r1.fact_chain_ok:
            out.append((f"lemma-chain/{idx}", h,
                        CheckResult(f"lemma-chain/{idx}", -1.0, 0.0, "fail", {})))
        return out
    if suite == "main":
        n = int(rng.choice([2, 3]))
        K = random_ball(n, rng)
        inst = random_theta_instance(K, rng)
        mu = random_proper_measure(inst.domain, rng)
        A = random_block_cset(rng, inst.domain.radii)
        r = theta_dominance_check(inst, mu, A, spec=QuadratureSpec(nodes, 2),
                                  check_id=f"main/{idx}")
        h = instance_hash({"n": n, "kind": inst.kind, "A": A.corners.tolist()})
        return [(r.check_id, h, r)]
    if suite == "moments":
        n = 3
        K = random_ball(n, rng)
        a = rng.uniform(-1.5, 1.5, size=n)
        p = int(rng.choice([4, 6]))
        r = moment_compare(K, a, p, spec=QuadratureSpec(max(nodes // 2, 32), 2),
                           check_id=f"moments/{idx}")
        h = instance_hash({"a": a.tolist(), "p": p})
        return [(r.check_id, h, r)]
    raise ValueError(f"unknown suite {suite!r}")


def run_suite(suite: str, count: int, seed: int, nodes: int = 64,
              workers: int = 1, grid: int = 16) -> list:
    """All rows of a suite, in instance order regardless of worker count."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; pick one of {SUITES}")
    args = [(suite, idx, seed, nodes, grid) for idx in range(count)]
    if workers <= 1:
        rows = [run_instance(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_star, args, chunksize=max(count // (4 * workers), 1)))
    return [r for chunk in rows for r in chunk]


def _run_star(a):
    return run_instance(*a)
