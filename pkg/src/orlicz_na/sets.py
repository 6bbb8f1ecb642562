"""Down-closed test sets and monotone / radius-wise test functions.

c-sets are finite unions of corner boxes (the down-closure of finitely many
points), which keeps membership exact and lets every measure computation
decompose into disjoint axis-aligned boxes.  Stair sets are the 2-D staircase
approximations used to squeeze general c-sets from outside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CSet:
    """Union of corner boxes: x belongs iff x <= c coordinate-wise for some corner."""

    corners: np.ndarray  # (j, n)

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.corners, dtype=np.float64))
        if c.ndim != 2 or c.shape[0] < 1:
            raise ValueError("need at least one corner")
        if not np.all(np.isfinite(c)) or np.any(c < 0):
            raise ValueError("corners must be finite and nonnegative")
        object.__setattr__(self, "corners", c)

    @property
    def n(self) -> int:
        return self.corners.shape[1]

    def membership(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        dominated = np.all(pts[:, None, :] <= self.corners[None, :, :], axis=2)
        return np.any(dominated, axis=1)

    def clip(self, hi) -> "CSet":
        return CSet(np.minimum(self.corners, np.asarray(hi, dtype=np.float64)))

    def max_point(self) -> np.ndarray:
        return self.corners.max(axis=0)


def cset_membership(A: CSet, x) -> bool:
    return bool(A.membership(np.asarray(x, dtype=float))[0])


def random_cset(n: int, j: int, box, seed: int) -> CSet:
    """j pseudo-random corners inside the box; equal seeds give identical sets."""
    if j < 1:
        raise ValueError("need at least one corner")
    rng = np.random.default_rng(seed)
    hi = np.broadcast_to(np.asarray(box, dtype=np.float64), (n,))
    return CSet(rng.uniform(0.0, 1.0, size=(j, n)) * hi)


@dataclass(frozen=True)
class StairSet:
    """Finite staircase: step k covers x in [xs[k], xs[k+1]) at height heights[k];
    the last step extends to infinity."""

    xs: np.ndarray
    heights: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=np.float64)
        hs = np.asarray(self.heights, dtype=np.float64)
        if xs.shape != hs.shape or xs.ndim != 1 or len(xs) < 1:
            raise ValueError("xs and heights must be equal-length 1-D arrays")
        if xs[0] != 0.0 or np.any(np.diff(xs) <= 0):
            raise ValueError("xs must start at 0 and increase strictly")
        if np.any(np.diff(hs) > 0) or np.any(hs < 0):
            raise ValueError("heights must be nonincreasing and nonnegative")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "heights", hs)

    def membership(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        k = np.searchsorted(self.xs, pts[:, 0], side="right") - 1
        return (pts[:, 0] >= 0) & (pts[:, 1] >= 0) & (pts[:, 1] <= self.heights[k])

    def as_cset(self, x_end: float) -> CSet:
        """Corner-box form, truncating the last step at x_end."""
        rights = np.append(self.xs[1:], max(x_end, self.xs[-1]))
        corners = np.column_stack([rights, self.heights])
        return CSet(corners[self.heights > 0] if np.any(self.heights > 0) else corners[:1])

    def area(self, x_end: float) -> float:
        rights = np.append(self.xs[1:], max(x_end, self.xs[-1]))
        return float(np.sum((rights - self.xs) * self.heights))


def stair_approximate(A: CSet, resolution: int) -> StairSet:
    """Superset staircase of a bounded 2-D c-set with steps of width 1/resolution.

    Guarantees A subset A_res and A_{2 res} subset A_res.
    """
    if A.n != 2:
        raise ValueError("stair approximation is 2-D only")
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    xmax = float(A.corners[:, 0].max())
    steps = int(math.floor(xmax * resolution)) + 1
    xs = np.arange(steps) / resolution
    heights = np.empty(steps)
    for k, x in enumerate(xs):
        qualifying = A.corners[A.corners[:, 0] >= x - 1e-15 * max(1.0, x)]
        heights[k] = qualifying[:, 1].max() if len(qualifying) else 0.0
    # enforce the monotone invariant against fp ties
    heights = np.maximum.accumulate(heights[::-1])[::-1]
    return StairSet(xs, heights)


# -- disjoint box decompositions ------------------------------------------------

def _axis_coords(A: CSet, hi) -> list:
    hi = np.asarray(hi, dtype=np.float64)
    out = []
    for i in range(A.n):
        vals = np.unique(np.concatenate([[0.0, hi[i]], np.minimum(A.corners[:, i], hi[i])]))
        vals = vals[(vals >= 0.0) & (vals <= hi[i])]
        out.append(vals)
    return out

def cset_boxes(A: CSet, hi, complement: bool = False) -> list:
    """Disjoint boxes tiling (A or its complement) within the box [0, hi].

    Every cell of the grid induced by the corner coordinates lies entirely
    inside or outside the union of corner boxes, so midpoint tests are exact.
    Runs of cells along the last axis are merged.
    """
    coords = _axis_coords(A, hi)
    edges = [np.stack([c[:-1], c[1:]], axis=1) for c in coords]
    counts = [len(e) for e in edges]
    if any(c == 0 for c in counts):
        return []
    boxes = []
    n = A.n
    lead_shape = counts[:-1]
    for flat in range(int(np.prod(lead_shape)) if lead_shape else 1):
        idx = np.unravel_index(flat, lead_shape) if lead_shape else ()
        lo_lead = [edges[i][idx[i], 0] for i in range(n - 1)]
        hi_lead = [edges[i][idx[i], 1] for i in range(n - 1)]
        mids_last = 0.5 * (edges[-1][:, 0] + edges[-1][:, 1])
        pts = np.empty((len(mids_last), n))
        for i in range(n - 1):
            pts[:, i] = 0.5 * (lo_lead[i] + hi_lead[i])
        pts[:, -1] = mids_last
        inside = A.membership(pts)
        if complement:
            inside = ~inside
        k = 0
        while k < len(inside):
            if not inside[k]:
                k += 1
                continue
            k2 = k
            while k2 + 1 < len(inside) and inside[k2 + 1]:
                k2 += 1
            lo = np.array(lo_lead + [edges[-1][k, 0]])
            hb = np.array(hi_lead + [edges[-1][k2, 1]])
            boxes.append((lo, hb))
            k = k2 + 1
    return boxes


def product_boxes(parts: list, n: int, hi) -> list:
    """n-dim boxes from per-block box lists.

    ``parts`` is a list of (axes, boxes) pairs with disjoint axis tuples;
    axes not covered by any block span the full [0, hi] range.
    """
    hi = np.asarray(hi, dtype=np.float64)
    covered = [a for axes, _ in parts for a in axes]
    if len(set(covered)) != len(covered):
        raise ValueError("blocks must use disjoint axes")
    out = [(np.zeros(n), hi.copy())]
    for axes, boxes in parts:
        nxt = []
        for lo0, hi0 in out:
            for blo, bhi in boxes:
                lo = lo0.copy()
                hb = hi0.copy()
                for k, ax in enumerate(axes):
                    lo[ax] = blo[k]
                    hb[ax] = bhi[k]
                nxt.append((lo, hb))
        out = nxt
    return [(lo, hb) for lo, hb in out if np.all(hb > lo)]


# -- monotone and radius-wise test functions ------------------------------------

class MonotoneFn:
    """Coordinate-wise increasing function on the positive quadrant."""

    def __init__(self, kind: str, **params):
        if kind not in ("complement_indicator", "polynomial", "max_scaled", "compose"):
            raise ValueError(f"unknown kind {kind!r}")
        self.kind = kind
        self.params = params

    def __call__(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        if self.kind == "complement_indicator":
            return 1.0 - self.params["cset"].membership(pts).astype(float)
        if self.kind == "polynomial":
            acc = np.zeros(pts.shape[0])
            for coef, expo in self.params["terms"]:
                acc += coef * np.prod(pts ** np.asarray(expo, dtype=float), axis=1)
            return acc
        if self.kind == "max_scaled":
            a = np.asarray(self.params["a"], dtype=np.float64)
            return np.max(pts * a, axis=1)
        inner = self.params["inner"](pts)
        return _scalar_map(self.params["map"], inner)


class RadiusFn:
    """Radius-wise increasing function: f(t*x) >= f(x) for t > 1 on the quadrant."""

    def __init__(self, kind: str, **params):
        if kind not in ("abs_linear", "max_abs_linear", "compose"):
            raise ValueError(f"unknown kind {kind!r}")
        self.kind = kind
        self.params = params

    def __call__(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        if self.kind == "abs_linear":
            a = np.asarray(self.params["a"], dtype=np.float64)
            return np.abs(pts @ a)
        if self.kind == "max_abs_linear":
            A = np.atleast_2d(np.asarray(self.params["rows"], dtype=np.float64))
            return np.max(np.abs(pts @ A.T), axis=1)
        inner = self.params["inner"](pts)
        return _scalar_map(self.params["map"], inner)


def _scalar_map(name: str, t: np.ndarray) -> np.ndarray:
    if name == "tanh":
        return np.tanh(t)
    if name == "log1p":
        return np.log1p(t)
    if name == "square":
        return t * t
    if name == "affine":
        return 0.5 + 2.0 * t
    raise ValueError(f"unknown scalar map {name!r}")


def eval_monotone(f, x) -> float:
    """Single-point evaluation of a MonotoneFn or RadiusFn."""
    return float(f(np.asarray(x, dtype=float))[0])
