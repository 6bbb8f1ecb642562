"""Seeded samplers: rejection and hit-and-run on Orlicz balls, and the
radial/cone-measure construction for lp-symmetric densities.

Reproducibility contract: (method, seed, N, burn_in, thinning, chains) fully
determine a batch on a given backend.  All randomness is drawn from
numpy PCG64 generators derived from one SeedSequence, in a fixed order, and
handed to the deterministic kernels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ._kernels import impl as _impl
from .young import OrliczBall

_CHUNK = 65536


@dataclass
class SampleBatch:
    points: np.ndarray           # (N, n)
    seed: int
    method: str
    burn_in: int = 0
    thinning: int = 1
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]


def _rng(seed, *key):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def sample_rejection(K: OrliczBall, N: int, seed: int, quadrant: bool = True) -> SampleBatch:
    """i.i.d. uniform points on K+ (or on K via random sign flips).

    Refuses when the estimated acceptance rate is below 1e-4; hit-and-run is
    the tool for that regime.
    """
    rng = _rng(seed, 0)
    box = K.box
    kept = []
    accepted = 0
    proposed = 0
    while accepted < N:
        pts = rng.uniform(0.0, 1.0, size=(_CHUNK, K.n)) * box
        inside = K.residual(pts) <= 1.0
        kept.append(pts[inside])
        accepted += int(inside.sum())
        proposed += _CHUNK
        if proposed >= _CHUNK and accepted == 0 or (
                proposed >= 4 * _CHUNK and (accepted + 1) / (proposed + 2) < 1e-4):
            raise RuntimeError(
                "rejection acceptance rate below 1e-4; use sample_hit_and_run")
    points = np.concatenate(kept)[:N]
    if not quadrant:
        signs = _rng(seed, 1).integers(0, 2, size=points.shape) * 2 - 1
        points = points * signs
    return SampleBatch(points, seed, "rejection",
                       meta={"acceptance_rate": accepted / proposed,
                             "quadrant": quadrant})


def sample_hit_and_run(K: OrliczBall, N: int, seed: int, burn_in: int = 1000,
                       thinning: int = 1, chains: int = 8,
                       quadrant: bool = True) -> SampleBatch:
    """Hit-and-run chains targeting uniform on K+; chord ends by bisection.

    ``chains`` independent streams run in parallel from a deterministic
    interior start; kept points are concatenated in chain order.
    """
    if N < 1:
        raise ValueError("need N >= 1")
    kept_per = -(-N // chains)
    steps = burn_in + kept_per * thinning
    box = K.box
    start = np.tile(box / (2.0 * K.n), (chains, 1))
    dirs = np.empty((steps, chains, K.n))
    us = np.empty((steps, chains))
    for c in range(chains):
        g = _rng(seed, 2, c)
        dirs[:, c, :] = g.standard_normal((steps, K.n))
        us[:, c] = g.uniform(size=steps)
    traj = _impl.hnr_chains(K.code, start, dirs, us, box)
    keep_idx = burn_in + thinning * np.arange(kept_per) + (thinning - 1)
    kept = traj[keep_idx]                      # (kept_per, chains, n)
    acf = _lag1_autocorr(kept)
    points = kept.transpose(1, 0, 2).reshape(-1, K.n)[:N]
    if not quadrant:
        signs = _rng(seed, 3).integers(0, 2, size=points.shape) * 2 - 1
        points = points * signs
    return SampleBatch(points, seed, "hit-and-run", burn_in=burn_in,
                       thinning=thinning,
                       meta={"chains": chains, "lag1_autocorr": acf,
                             "quadrant": quadrant})


def _lag1_autocorr(kept: np.ndarray) -> list:
    if kept.shape[0] < 3:
        return [0.0] * kept.shape[2]
    x = kept - kept.mean(axis=0, keepdims=True)
    num = np.sum(x[1:] * x[:-1], axis=(0, 1))
    den = np.sum(x * x, axis=(0, 1))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(den > 0, num / den, 0.0)
    return [float(v) for v in r]


@dataclass(frozen=True)
class RadialDensity:
    """Log-concave radial profile m applied to ||x||_p^p."""

    kind: str                 # "indicator" | "exp" | "gauss"
    p: float = 2.0
    r0: float = 1.0           # indicator support [0, r0] (in the s variable)
    sigma: float = 1.0        # gauss scale

    def __post_init__(self):
        if self.kind not in ("indicator", "exp", "gauss"):
            raise ValueError(f"unknown radial kind {self.kind!r}")
        if self.p < 1.0:
            raise ValueError("need p >= 1")

    def m(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=np.float64)
        if self.kind == "indicator":
            return (s <= self.r0).astype(float)
        if self.kind == "exp":
            return np.exp(-s)
        return np.exp(-0.5 * (s / self.sigma) ** 2)


def _sample_radius(dens: RadialDensity, n: int, N: int, rng) -> np.ndarray:
    """Radius with density proportional to r**(n-1) * m(r**p)."""
    p = dens.p
    if dens.kind == "indicator":
        # ||x||_p <= r0^(1/p): inverse CDF of r^n
        return dens.r0 ** (1.0 / p) * rng.uniform(size=N) ** (1.0 / n)
    if dens.kind == "exp":
        # substituting s = r^p gives s ~ Gamma(n/p)
        return rng.standard_gamma(n / p, size=N) ** (1.0 / p)
    # numeric inverse CDF on a fine grid
    smax = 8.0 * dens.sigma
    rmax = smax ** (1.0 / p)
    grid = np.linspace(0.0, rmax, 16385)
    pdf = grid ** (n - 1) * dens.m(grid ** p)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(grid))])
    if not (np.isfinite(cdf[-1]) and cdf[-1] > 0):
        raise ValueError("radial density is not normalizable")
    cdf /= cdf[-1]
    return np.interp(rng.uniform(size=N), cdf, grid)


def sample_lp(n: int, dens: RadialDensity, N: int, seed: int,
              quadrant: bool = False) -> SampleBatch:
    """Points with density proportional to m(||x||_p^p).

    Directions come from the cone measure on the lp sphere (normalized
    p-generalized normals), the radius from the 1-D density r^(n-1) m(r^p);
    the product reproduces the target law.
    """
    rng = _rng(seed, 4)
    p = dens.p
    g = rng.standard_gamma(1.0 / p, size=(N, n)) ** (1.0 / p)
    if not quadrant:
        signs = rng.integers(0, 2, size=(N, n)) * 2 - 1
        g = g * signs
    norm = np.sum(np.abs(g) ** p, axis=1) ** (1.0 / p)
    theta = g / norm[:, None]
    r = _sample_radius(dens, n, N, rng)
    return SampleBatch(theta * r[:, None], seed, "lp-radial",
                       meta={"p": p, "kind": dens.kind, "quadrant": quadrant})


def independent_copies(batch: SampleBatch, seed: int) -> SampleBatch:
    """Coordinate-wise independent resample: each column is bootstrapped
    on its own, so marginals are preserved and coordinates decouple."""
    N = len(batch)
    if N < 2:
        raise ValueError("need at least two rows")
    rng = _rng(seed, 5)
    cols = [batch.points[rng.integers(0, N, size=N), i] for i in range(batch.n)]
    return SampleBatch(np.column_stack(cols), seed, batch.method + "+independent",
                       meta={"source_seed": batch.seed})


def export_csv(batch: SampleBatch, path: str) -> None:
    """CSV with header x1..xn plus a JSON metadata sidecar at path + '.json'."""
    header = ",".join(f"x{i + 1}" for i in range(batch.n))
    np.savetxt(path, batch.points, delimiter=",", header=header,
               comments="", fmt="%.17g")
    side = {
        "seed": batch.seed,
        "method": batch.method,
        "rows": len(batch),
        "dim": batch.n,
        "burn_in": batch.burn_in,
        "thinning": batch.thinning,
        "meta": batch.meta,
    }
    with open(path + ".json", "w") as fh:
        json.dump(side, fh, indent=2, sort_keys=True)
        fh.write("\n")
