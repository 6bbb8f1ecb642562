"""Seeded generators for randomized verification suites.

Everything is a deterministic function of a numpy Generator (or an integer
seed), so suite rows are reproducible and independent of worker scheduling.
"""

from __future__ import annotations

import numpy as np

from .sets import CSet, MonotoneFn, RadiusFn
from .verify import ConcaveFactor, LogConcaveWeight, ProperMeasure, RadiusSet, ThetaInstance
from .young import OrliczBall, YoungFunction


def _rng_of(seed_or_rng):
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def random_young(rng, proper: bool = False) -> YoungFunction:
    kind = rng.choice(["power", "pl", "cube"] if not proper else ["power", "pl"])
    if kind == "power":
        p = float(rng.uniform(1.0, 4.0))
        scale = float(rng.uniform(0.3, 3.0))
        return YoungFunction.power(p, scale)
    if kind == "cube":
        return YoungFunction.flat_then_inf(float(rng.uniform(0.3, 2.0)))
    nseg = int(rng.integers(2, 5))
    flat = (not proper) and rng.random() < 0.35
    xs = np.concatenate([[0.0], np.sort(rng.uniform(0.05, 2.0, nseg))])
    slopes = np.sort(rng.uniform(0.2, 4.0, nseg))
    if flat:
        slopes[0] = 0.0
    ys = np.concatenate([[0.0], np.cumsum(slopes * np.diff(xs))])
    pts = list(zip(xs, ys))
    if (not proper) and rng.random() < 0.3:
        pts.append((xs[-1] + float(rng.uniform(0.1, 0.5)), np.inf))
    return YoungFunction.piecewise_linear(pts)


def random_ball(n: int, seed, proper: bool = False) -> OrliczBall:
    rng = _rng_of(seed)
    return OrliczBall([random_young(rng, proper=proper) for _ in range(n)])


def random_degenerate_ball(n: int, seed) -> OrliczBall:
    """Ball with at least one flat start or +inf jump (properize fodder)."""
    rng = _rng_of(seed)
    young = [random_young(rng) for _ in range(n)]
    if all(f.is_proper for f in young):
        i = int(rng.integers(0, n))
        young[i] = YoungFunction.flat_then_inf(float(rng.uniform(0.3, 1.5)))
    return OrliczBall(young)


def random_block_cset(rng, axes_hi: np.ndarray, max_corners: int = 3) -> CSet:
    j = int(rng.integers(1, max_corners + 1))
    corners = rng.uniform(0.15, 1.0, size=(j, len(axes_hi))) * axes_hi
    return CSet(corners)


def random_monotone_fn(rng, k: int, box_hi=None) -> MonotoneFn:
    kind = rng.choice(["polynomial", "max_scaled", "complement_indicator", "compose"])
    if kind == "polynomial":
        terms = []
        for _ in range(int(rng.integers(1, 4))):
            coef = float(rng.uniform(0.1, 2.0))
            expo = rng.choice([0.0, 0.5, 1.0, 2.0], size=k)
            terms.append((coef, tuple(expo)))
        return MonotoneFn("polynomial", terms=terms)
    if kind == "max_scaled":
        return MonotoneFn("max_scaled", a=rng.uniform(0.2, 2.0, size=k))
    if kind == "complement_indicator":
        hi = np.ones(k) if box_hi is None else np.asarray(box_hi)
        return MonotoneFn("complement_indicator", cset=random_block_cset(rng, hi))
    inner = MonotoneFn("polynomial",
                       terms=[(float(rng.uniform(0.2, 1.5)), tuple(rng.choice([1.0, 2.0], size=k)))])
    return MonotoneFn("compose", inner=inner, map=str(rng.choice(["tanh", "log1p", "affine"])))


def random_radius_fn(rng, k: int) -> RadiusFn:
    kind = rng.choice(["abs_linear", "max_abs_linear", "compose"])
    if kind == "abs_linear":
        return RadiusFn("abs_linear", a=rng.uniform(-1.5, 1.5, size=k))
    if kind == "max_abs_linear":
        rows = rng.uniform(-1.5, 1.5, size=(int(rng.integers(1, 4)), k))
        return RadiusFn("max_abs_linear", rows=rows)
    inner = RadiusFn("abs_linear", a=rng.uniform(-1.5, 1.5, size=k))
    return RadiusFn("compose", inner=inner, map=str(rng.choice(["tanh", "log1p", "square"])))


def random_radius_set(rng, k: int) -> RadiusSet:
    rho = random_radius_fn(rng, k)
    probe = rho(rng.uniform(0.0, 1.0, size=(64, k)))
    level = float(np.quantile(probe, rng.uniform(0.3, 0.9))) + 1e-6
    return RadiusSet(rho, level)


def random_concave_factor(rng, hi: float) -> ConcaveFactor:
    nk = int(rng.integers(2, 5))
    knots = np.concatenate([[0.0], np.sort(rng.uniform(0.1, 1.0, nk - 1)) * hi])
    knots[-1] = hi
    knots = np.unique(knots)
    slopes = -np.sort(rng.uniform(-1.5, 1.5, len(knots) - 1))  # decreasing
    values = np.concatenate([[float(rng.uniform(0.5, 2.0))],
                             np.cumsum(slopes * np.diff(knots))])
    values[1:] += values[0]
    values -= min(values.min(), 0.0)
    values = np.maximum(values, 0.0)
    if values.max() <= 0:
        values += 1.0
    return ConcaveFactor(knots, values, power=int(rng.integers(1, 4)))


def random_proper_measure(ball: OrliczBall, seed) -> ProperMeasure:
    rng = _rng_of(seed)
    if rng.random() < 0.25:
        return ProperMeasure.lebesgue(ball)
    fx = random_concave_factor(rng, float(ball.radii[0]))
    fy = random_concave_factor(rng, float(ball.radii[1])) if ball.n >= 2 else None
    return ProperMeasure(ball, fx, fy)


def random_log_concave_weight(rng, k: int) -> LogConcaveWeight:
    coeffs = []
    for _ in range(k):
        coeffs.append((float(rng.uniform(0.0, 2.0)),
                       float(rng.uniform(-1.0, 1.0)),
                       float(rng.uniform(0.0, 1.0))))
    return LogConcaveWeight(tuple(coeffs))


def random_theta_instance(K: OrliczBall, rng, psi_bins: int = 2048):
    """A phi or psi instance on a random axis split of the ball."""
    n = K.n
    if n >= 3 and rng.random() < 0.5:
        z_count = int(rng.integers(1, min(n - 1, 2) + 1))
        z_axes = sorted(rng.choice(n, size=z_count, replace=False).tolist())
        k = len(z_axes)
        hi = K.radii[z_axes]
        B = random_block_cset(rng, hi)
        return ThetaInstance.psi_pair(K, z_axes, B, bins=psi_bins)
    z_axis = int(rng.integers(0, n))
    R = float(K.radii[z_axis])
    z1 = float(rng.uniform(0.0, 0.5)) * R
    z2 = float(rng.uniform(0.55, 0.9)) * R
    return ThetaInstance.phi_pair(K, z_axis, z1, z2)
