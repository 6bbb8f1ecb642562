"""Deterministic integration over Orlicz-ball quadrants (n <= 4).

The workhorse is a tensor midpoint rule over [0, R_1] x ... x [0, R_n] with
exact cell classification (the Young sums are monotone, so corner values
bracket a cell).  Cells crossing the boundary shell are handled either by
subsampled midpoints or, by default, by clipping the last axis exactly via
the inverse Young function.  Every integral carries a two-level refinement
error estimate.

``budget_volume`` is a separate 1-D convolution construction for plain
volumes and axis moments that works in any dimension: the pushforward of
Lebesgue measure under each f_i is binned on a budget lattice and convolved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sets import CSet, cset_boxes
from .young import EmptyBall, OrliczBall, section_ball


@dataclass(frozen=True)
class QuadratureSpec:
    nodes: int = 256              # cells per axis on the finest level
    levels: int = 3               # refinement levels for the error estimate
    rule: str = "clip"            # "clip" | "midpoint"
    boundary_subsample: int = 4   # transverse subdivisions of boundary cells

    def __post_init__(self):
        if self.nodes < 8:
            raise ValueError("node counts below 8 are not allowed")
        if self.levels < 1:
            raise ValueError("need at least one level")
        if self.rule not in ("clip", "midpoint"):
            raise ValueError(f"unknown rule {self.rule!r}")
        if self.boundary_subsample < 1:
            raise ValueError("boundary_subsample must be >= 1")


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    nodes_used: int

    def __add__(self, other):
        return IntegralResult(self.value + other.value,
                              self.error_estimate + other.error_estimate,
                              self.nodes_used + other.nodes_used)


def combined_tol(*results, floor: float = 1e-12) -> float:
    """Default inequality tolerance: 3x the summed error estimates plus a floor."""
    return 3.0 * sum(r.error_estimate for r in results) + floor


ZERO = IntegralResult(0.0, 0.0, 0)


# -- core box integration -------------------------------------------------------

def _integrate_box(K: OrliczBall, weight, lo, hi, cells, rule, sub):
    """Single-level integral of weight * 1_{K+} over the box [lo, hi]."""
    n = K.n
    edges = [np.linspace(lo[i], hi[i], cells[i] + 1) for i in range(n)]
    fvals = [K.eval_axis(i, e) for i, e in enumerate(edges)]
    mids = [0.5 * (e[:-1] + e[1:]) for e in edges]
    widths = [np.diff(e) for e in edges]
    total = 0.0
    # broadcast residual sums over the non-leading axes, one leading slab at a time
    rest_min = 0.0
    rest_max = 0.0
    for i in range(1, n):
        shape = [1] * (n - 1)
        shape[i - 1] = cells[i]
        rest_min = rest_min + fvals[i][:-1].reshape(shape)
        rest_max = rest_max + fvals[i][1:].reshape(shape)
    rest_w = 1.0
    for i in range(1, n):
        shape = [1] * (n - 1)
        shape[i - 1] = cells[i]
        rest_w = rest_w * widths[i].reshape(shape)
    if n > 1:
        rest_mid_w = None
        mid_grids = np.meshgrid(*mids[1:], indexing="ij") if n > 1 else []
    for k0 in range(cells[0]):
        if n == 1:
            rmin = np.array(fvals[0][k0])
            rmax = np.array(fvals[0][k0 + 1])
        else:
            rmin = fvals[0][k0] + rest_min
            rmax = fvals[0][k0 + 1] + rest_max
        interior = rmax <= 1.0
        boundary = (~interior) & (rmin <= 1.0)
        if n == 1:
            cellw = widths[0][k0]
            if interior:
                w = 1.0 if weight is None else float(weight(np.array([[mids[0][k0]]]))[0])
                total += cellw * w
            elif boundary:
                total += _boundary_cells(K, weight,
                                         np.array([[edges[0][k0]]]),
                                         np.array([[edges[0][k0 + 1]]]),
                                         rule, sub)
            continue
        if interior.any():
            vol = widths[0][k0] * rest_w
            if weight is None:
                total += float(np.sum(np.where(interior, vol, 0.0)))
            else:
                idx = np.nonzero(interior)
                pts = np.empty((idx[0].size, n))
                pts[:, 0] = mids[0][k0]
                for i in range(1, n):
                    pts[:, i] = mid_grids[i - 1][idx]
                vols = np.broadcast_to(vol, interior.shape)[idx]
                total += float(np.sum(weight(pts) * vols))
        if boundary.any():
            idx = np.nonzero(boundary)
            m = idx[0].size
            blo = np.empty((m, n))
            bhi = np.empty((m, n))
            blo[:, 0] = edges[0][k0]
            bhi[:, 0] = edges[0][k0 + 1]
            for i in range(1, n):
                blo[:, i] = edges[i][idx[i - 1]]
                bhi[:, i] = edges[i][idx[i - 1] + 1]
            total += _boundary_cells(K, weight, blo, bhi, rule, sub)
    return total


def _boundary_cells(K: OrliczBall, weight, blo, bhi, rule, sub):
    """Contribution of boundary cells given as (m, n) corner arrays."""
    n = K.n
    m = blo.shape[0]
    total = 0.0
    if rule == "midpoint":
        # subsampled pure midpoint: s^n subcells, indicator at subcell midpoint
        h = (bhi - blo) / sub
        subvol = np.prod(h, axis=1)
        for flat in range(sub ** n):
            off = np.unravel_index(flat, (sub,) * n)
            pts = blo + (np.asarray(off, dtype=float) + 0.5) * h
            inside = K.residual(pts) <= 1.0
            if not inside.any():
                continue
            w = 1.0 if weight is None else weight(pts[inside])
            total += float(np.sum(w * subvol[inside]))
        return total
    # clip rule: subdivide transverse axes, clip the last axis exactly
    h = (bhi[:, :-1] - blo[:, :-1]) / sub if n > 1 else np.empty((m, 0))
    area = np.prod(h, axis=1) if n > 1 else np.ones(m)
    ncols = sub ** (n - 1)
    for flat in range(ncols):
        off = np.unravel_index(flat, (sub,) * (n - 1)) if n > 1 else ()
        pts = np.empty((m, n))
        budget = np.ones(m)
        for i in range(n - 1):
            pts[:, i] = blo[:, i] + (off[i] + 0.5) * h[:, i]
            budget -= K.eval_axis(i, pts[:, i])
        yhi = K.inv_axis(n - 1, budget)
        ylen = np.clip(yhi, blo[:, -1], bhi[:, -1]) - blo[:, -1]
        pos = ylen > 0.0
        if not pos.any():
            continue
        pts[:, -1] = blo[:, -1] + 0.5 * ylen
        w = 1.0 if weight is None else weight(pts[pos])
        total += float(np.sum(w * (ylen[pos] * area[pos])))
    return total


# -- public entry points ---------------------------------------------------------

def _resolve_region(K: OrliczBall, region):
    hi = K.box
    if region is None or (isinstance(region, str) and region == "all"):
        return [(np.zeros(K.n), hi.copy())]
    if isinstance(region, CSet):
        return cset_boxes(region, hi)
    if isinstance(region, tuple) and len(region) == 2 and isinstance(region[0], str):
        kind, A = region
        if kind != "complement":
            raise ValueError(f"unknown region kind {kind!r}")
        return cset_boxes(A, hi, complement=True)
    return list(region)  # explicit list of (lo, hi) boxes


def _alloc_cells(K: OrliczBall, lo, hi, nodes):
    spacing = np.maximum(K.box, 1e-300) / nodes
    return [max(int(round((hi[i] - lo[i]) / spacing[i])), 1) for i in range(K.n)]


def integrate_quadrant(K: OrliczBall, weight=None, region="all",
                       spec: QuadratureSpec = QuadratureSpec()) -> IntegralResult:
    """integral of weight over K+ intersected with the region (n <= 4)."""
    if isinstance(K, EmptyBall):
        return ZERO
    if K.n > 4:
        raise ValueError("deterministic quadrature is for n <= 4; use the samplers")
    boxes = _resolve_region(K, region)
    if not boxes:
        return ZERO
    vals = []
    nodes_used = 0
    for lvl in range(min(spec.levels, 3)):
        nodes = max(spec.nodes >> lvl, 4)
        v = 0.0
        for lo, hi in boxes:
            cells = _alloc_cells(K, lo, hi, nodes)
            if lvl == 0:
                nodes_used += int(np.prod(cells))
            v += _integrate_box(K, weight, lo, hi, cells, spec.rule,
                                spec.boundary_subsample)
        vals.append(v)
        if nodes <= 4:
            break
    if len(vals) > 2:
        err = max(abs(vals[0] - vals[1]), 0.25 * abs(vals[1] - vals[2]))
    elif len(vals) > 1:
        err = abs(vals[0] - vals[1])
    else:
        err = abs(vals[0]) * 1e-7
    return IntegralResult(vals[0], err, nodes_used)


def section_measure(K: OrliczBall, fixed: dict, weight=None,
                    spec: QuadratureSpec = QuadratureSpec()) -> IntegralResult:
    """Integral over the section of K+ at the given {axis: value} assignment.

    The weight takes the remaining coordinates in their original order.
    """
    if isinstance(K, EmptyBall):
        return ZERO
    if K.n - len(fixed) > 3:
        raise ValueError("free dimension must be <= 3")
    S = K
    for ax in sorted(fixed, reverse=True):
        S = section_ball(S, ax, fixed[ax])
        if isinstance(S, EmptyBall):
            return ZERO
    return integrate_quadrant(S, weight=weight, spec=spec)


# -- 1-D helpers and the ratio comparison utilities -------------------------------

def integrate_1d(fn, a: float, b: float, nodes: int = 2048, levels: int = 2) -> IntegralResult:
    """Midpoint rule with a refinement error estimate; fn is vectorized."""
    if b <= a:
        return ZERO
    vals = []
    for lvl in range(levels):
        m = max(nodes >> lvl, 4)
        xs = a + (np.arange(m) + 0.5) * (b - a) / m
        vals.append(float(np.sum(fn(xs))) * (b - a) / m)
    err = abs(vals[0] - vals[1]) if len(vals) > 1 else abs(vals[0]) * 1e-7
    return IntegralResult(vals[0], err, nodes)


@dataclass
class ComparisonReport:
    lhs: float | None
    rhs: float | None
    margin: float | None
    tol: float
    verdict: str                      # "pass" | "fail" | "undefined"
    fact_chain_ok: bool = True
    detail: dict = field(default_factory=dict)


def _ratio(num: IntegralResult, den: IntegralResult):
    tol = combined_tol(den)
    if den.value <= tol:
        return None, 0.0
    r = num.value / den.value
    err = (num.error_estimate + abs(r) * den.error_estimate) / den.value
    return r, err


def ratio_compare(f, g, mu, interval_left, interval_right,
                  nodes: int = 4096) -> ComparisonReport:
    """Checks int_a^b f dmu / int_a^b g dmu >= the same ratio on (c, d).

    Valid whenever f/g is nonincreasing and the intervals are ordered as
    a < b <= d, a <= c < d; "undefined" (not a failure) when a denominator
    vanishes.  Every invocation also cross-checks the mediant chain
    a/c >= (a+b)/(c+d) >= b/d on the four integrals.
    """
    a, b = interval_left
    c, d = interval_right
    mu = mu if mu is not None else (lambda x: np.ones_like(x))
    F1 = integrate_1d(lambda x: f(x) * mu(x), a, b, nodes)
    G1 = integrate_1d(lambda x: g(x) * mu(x), a, b, nodes)
    F2 = integrate_1d(lambda x: f(x) * mu(x), c, d, nodes)
    G2 = integrate_1d(lambda x: g(x) * mu(x), c, d, nodes)
    lhs, el = _ratio(F1, G1)
    rhs, er = _ratio(F2, G2)
    tol = 3.0 * (el + er) + 1e-12
    if lhs is None or rhs is None:
        return ComparisonReport(lhs, rhs, None, tol, "undefined")
    margin = lhs - rhs
    chain_ok = True
    denm = G1.value + G2.value
    if denm > combined_tol(G1, G2):
        mediant = (F1.value + F2.value) / denm
        chain_tol = tol + 3.0 * (el + er) + 1e-12
        if lhs >= rhs:
            chain_ok = (lhs >= mediant - chain_tol) and (mediant >= rhs - chain_tol)
    verdict = "pass" if margin >= -tol else "fail"
    return ComparisonReport(lhs, rhs, margin, tol, verdict, chain_ok,
                            {"F1": F1.value, "G1": G1.value, "F2": F2.value, "G2": G2.value})


def pairing_check(p, q, f, g, mu, interval, nodes: int = 4096) -> ComparisonReport:
    """Verifies int(pf) int(qg) <= int(pg) int(qf) for a monotone-ratio pairing."""
    a, b = interval
    mu = mu if mu is not None else (lambda x: np.ones_like(x))
    PF = integrate_1d(lambda x: p(x) * f(x) * mu(x), a, b, nodes)
    QG = integrate_1d(lambda x: q(x) * g(x) * mu(x), a, b, nodes)
    PG = integrate_1d(lambda x: p(x) * g(x) * mu(x), a, b, nodes)
    QF = integrate_1d(lambda x: q(x) * f(x) * mu(x), a, b, nodes)
    lhs = PF.value * QG.value
    rhs = PG.value * QF.value
    tol = 3.0 * (PF.error_estimate * abs(QG.value) + QG.error_estimate * abs(PF.value)
                 + PG.error_estimate * abs(QF.value) + QF.error_estimate * abs(PG.value)) + 1e-12
    verdict = "pass" if lhs <= rhs + tol else "fail"
    return ComparisonReport(lhs, rhs, rhs - lhs, tol, verdict)


# -- budget-lattice convolution (any dimension) ----------------------------------

def _axis_masses(f, bins: int) -> np.ndarray:
    """Pushforward of Lebesgue measure under f, binned on the budget lattice.

    Mass of budgets in ((k) h, (k+1) h] is split evenly between lattice points
    k and k+1 (mean preserving); the atom at budget 0 sits exactly at 0.
    """
    h = 1.0 / bins
    grid = np.arange(bins + 1) * h
    lengths = np.array([f.inverse(t) for t in grid])
    if not np.all(np.isfinite(lengths)):
        raise ValueError("axis measure is infinite below budget 1 (unbounded ball)")
    arr = np.zeros(bins + 2)
    arr[0] = lengths[0]
    dm = np.diff(lengths)
    arr[:-2] += 0.5 * dm
    arr[1:-1] += 0.5 * dm
    return arr[: bins + 1]


def _convolve_trim(a: np.ndarray, b: np.ndarray, keep: int) -> np.ndarray:
    """First ``keep`` entries of the linear convolution (FFT for large inputs)."""
    if len(a) * len(b) < 1 << 18:
        return np.convolve(a, b)[:keep]
    size = 1
    while size < len(a) + len(b) - 1:
        size <<= 1
    out = np.fft.irfft(np.fft.rfft(a, size) * np.fft.rfft(b, size), size)[:keep]
    return np.maximum(out, 0.0)


def budget_lattice_cdf(young_fns, bins: int = 8192) -> np.ndarray:
    """CDF on the budget lattice of the joint Young sum of the given axes:
    entry k approximates vol{x >= 0 : sum f_i(x_i) <= k/bins}."""
    q = None
    for f in young_fns:
        arr = _axis_masses(f, bins)
        q = arr if q is None else _convolve_trim(q, arr, bins + 1)
    return np.cumsum(q)


def budget_volume(K, bins: int = 4096) -> IntegralResult:
    """Quadrant volume via budget convolution; valid in any dimension."""
    if isinstance(K, EmptyBall):
        return ZERO
    fine = budget_lattice_cdf(K.young, bins)[-1]
    coarse = budget_lattice_cdf(K.young, bins // 2)[-1]
    return IntegralResult(float(fine), abs(float(fine) - float(coarse)), bins)


def _loo_mass_arrays(arrs: list, keep: int) -> list:
    """Leave-one-out convolutions via prefix/suffix products (2n convolutions)."""
    n = len(arrs)
    prefix = [None] * (n + 1)
    suffix = [None] * (n + 1)
    for i in range(n):
        prefix[i + 1] = arrs[i] if prefix[i] is None else _convolve_trim(prefix[i], arrs[i], keep)
    for i in range(n - 1, -1, -1):
        suffix[i] = arrs[i] if suffix[i + 1] is None else _convolve_trim(arrs[i], suffix[i + 1], keep)
    out = []
    for i in range(n):
        left, right = prefix[i], suffix[i + 1]
        if left is None and right is None:
            out.append(None)
        elif left is None:
            out.append(right)
        elif right is None:
            out.append(left)
        else:
            out.append(_convolve_trim(left, right, keep))
    return out


def _axis_moment_from_cdf(K: OrliczBall, i: int, power: float, cdf: np.ndarray,
                          nodes: int) -> float:
    lattice = np.arange(len(cdf)) / (len(cdf) - 1)
    R = float(K.radii[i])

    def fn(xs):
        budgets = 1.0 - K.eval_axis(i, xs)
        out = np.interp(budgets, lattice, cdf)
        out[budgets < 0] = 0.0
        return xs ** power * out

    return integrate_1d(fn, 0.0, R, nodes, levels=1).value


def all_axis_moments(K: OrliczBall, power: float = 2.0, bins: int = 4096,
                     nodes: int = 4096):
    """integral of x_i**power over K+ for every axis (unnormalized), with
    per-axis error estimates from a half-resolution pass."""
    n = K.n
    if n == 1:
        R = float(K.radii[0])
        r = integrate_1d(lambda xs: xs ** power * (K.eval_axis(0, xs) <= 1.0),
                         0.0, R, nodes)
        return np.array([r.value]), np.array([r.error_estimate])
    levels = []
    for b in (bins, bins // 2):
        arrs = [_axis_masses(f, b) for f in K.young]
        loo = _loo_mass_arrays(arrs, b + 1)
        levels.append(np.array([
            _axis_moment_from_cdf(K, i, power, np.cumsum(loo[i]), nodes)
            for i in range(n)]))
    return levels[0], np.abs(levels[0] - levels[1])


def axis_moment(K: OrliczBall, i: int, power: float, bins: int = 4096,
                nodes: int = 4096) -> IntegralResult:
    """integral of x_i**power over K+ (unnormalized), via the leave-one-out CDF."""
    others = [f for j, f in enumerate(K.young) if j != i]
    R = float(K.radii[i])
    if not others:
        def fn(xs):
            return xs ** power * (K.eval_axis(0, xs) <= 1.0)
        return integrate_1d(fn, 0.0, R, nodes)
    vals = []
    for b in (bins, bins // 2):
        cdf = budget_lattice_cdf(others, b)

        def fn(xs, cdf=cdf, lattice=np.arange(b + 1) / b):
            budgets = 1.0 - K.eval_axis(i, xs)
            out = np.interp(budgets, lattice, cdf)
            out[budgets < 0] = 0.0
            return xs ** power * out

        vals.append(integrate_1d(fn, 0.0, R, nodes).value)
    return IntegralResult(vals[0], abs(vals[0] - vals[1]), bins * nodes)
