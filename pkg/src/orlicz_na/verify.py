"""Numerical verification of the negative-association inequalities.

Every check returns a CheckResult with a signed margin, an honest tolerance
derived from quadrature error estimates (or sampling SEs), and a three-valued
verdict: "pass", "fail", or "vacuous" when a side of the inequality is
undefined (zero mass), mirroring the systematic "whenever both sides are
defined" guards of the statements being tested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quadrature import (
    IntegralResult,
    QuadratureSpec,
    ZERO,
    budget_lattice_cdf,
    combined_tol,
    integrate_quadrant,
    section_measure,
)
from .samplers import SampleBatch, independent_copies
from .sets import CSet, cset_boxes, product_boxes
from .young import EmptyBall, OrliczBall, section_ball


@dataclass
class CheckResult:
    check_id: str
    margin: float | None
    tol: float
    verdict: str                     # "pass" | "fail" | "vacuous"
    extras: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.verdict == "fail"


# -- proper measures --------------------------------------------------------------

@dataclass(frozen=True)
class ConcaveFactor:
    """(piecewise-linear concave base)**m, the 1/m-concave weight factor."""

    knots: np.ndarray
    values: np.ndarray
    power: int = 1

    def __post_init__(self):
        k = np.asarray(self.knots, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if k.ndim != 1 or k.shape != v.shape or len(k) < 2:
            raise ValueError("need matching 1-D knots and values")
        if k[0] != 0.0 or np.any(np.diff(k) <= 0):
            raise ValueError("knots must start at 0 and increase")
        if np.any(v < 0):
            raise ValueError("base must be nonnegative")
        slopes = np.diff(v) / np.diff(k)
        if np.any(np.diff(slopes) > 1e-9 * np.maximum(1.0, np.abs(slopes[:-1]))):
            raise ValueError("base must be concave")
        if self.power < 1:
            raise ValueError("power must be a positive integer")
        object.__setattr__(self, "knots", k)
        object.__setattr__(self, "values", v)

    def __call__(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        base = np.interp(xs, self.knots, self.values)
        base[xs > self.knots[-1]] = 0.0
        return base ** self.power

    @staticmethod
    def flat(hi: float) -> "ConcaveFactor":
        return ConcaveFactor(np.array([0.0, hi]), np.array([1.0, 1.0]), 1)


class ProperMeasure:
    """Density fx(x) * fy(y) * 1_{K+} with 1/m-concave factors on the first
    two axes of the domain ball (just fx in dimension one)."""

    def __init__(self, ball: OrliczBall, fx: ConcaveFactor, fy: ConcaveFactor | None = None):
        if ball.n >= 2 and fy is None:
            raise ValueError("two factors required in dimension >= 2")
        self.ball = ball
        self.fx = fx
        self.fy = fy if ball.n >= 2 else None

    def density(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        out = self.fx(pts[:, 0])
        if self.fy is not None:
            out = out * self.fy(pts[:, 1])
        return out

    @staticmethod
    def lebesgue(ball: OrliczBall) -> "ProperMeasure":
        fx = ConcaveFactor.flat(float(ball.radii[0]))
        fy = ConcaveFactor.flat(float(ball.radii[1])) if ball.n >= 2 else None
        return ProperMeasure(ball, fx, fy)


# -- theta instances ---------------------------------------------------------------

def _embed(rest_pts: np.ndarray, fixed: dict, n: int) -> np.ndarray:
    """Insert fixed coordinates back into reduced points (original order)."""
    rest_axes = [i for i in range(n) if i not in fixed]
    out = np.empty((rest_pts.shape[0], n))
    for k, ax in enumerate(rest_axes):
        out[:, ax] = rest_pts[:, k]
    for ax, v in fixed.items():
        out[:, ax] = v
    return out


class ThetaInstance:
    """A ratio functional theta(A) = int_A eta2 dmu / int_A eta1 dmu given by
    a pair of section indicators (phi form) or section volumes (psi form)."""

    def __init__(self, kind, domain, eta_balls=None, tables=None, label=""):
        self.kind = kind
        self.domain = domain
        self.eta_balls = eta_balls
        self.tables = tables
        self.label = label or kind

    # phi: eta_j(x) = 1_K(x, z_j), realized as the z_j section ball of K
    @staticmethod
    def phi_pair(K: OrliczBall, z_axis: int, z1: float, z2: float) -> "ThetaInstance":
        if not (0.0 <= z1 <= z2):
            raise ValueError("need z2 >= z1 >= 0")
        S1 = section_ball(K, z_axis, z1)
        S2 = section_ball(K, z_axis, z2)
        if isinstance(S1, EmptyBall):
            raise ValueError("empty base section")
        if isinstance(S2, EmptyBall):
            S2 = None
        return ThetaInstance("phi", S1, eta_balls=(S1, S2),
                             label=f"phi(z{z_axis}:{z1:.3g},{z2:.3g})")

    # psi: eta1(x) = vol{z : (z, x) in K+}, eta2 the same restricted to B-bar
    @staticmethod
    def psi_pair(K: OrliczBall, z_axes, B: CSet, bins: int = 4096) -> "ThetaInstance":
        z_axes = sorted(z_axes)
        x_axes = [i for i in range(K.n) if i not in z_axes]
        if not z_axes or not x_axes:
            raise ValueError("need a nontrivial split")
        domain = OrliczBall([K.young[i] for i in x_axes])
        zfns = [K.young[j] for j in z_axes]
        zball = OrliczBall(zfns)
        tables = {}
        for b in (bins, bins // 2):
            lattice = np.arange(b + 1) / b
            g_all = budget_lattice_cdf(zfns, b)
            g_b = _cset_budget_volume(zball, B, lattice)
            tables[b] = (lattice, g_all, np.maximum(g_all - g_b, 0.0))
        inst = ThetaInstance("psi", domain, tables=tables,
                             label=f"psi(z={z_axes},|B|={len(B.corners)})")
        inst._bins = bins
        return inst

    def eta_fn(self, j: int, pts: np.ndarray, coarse: bool = False) -> np.ndarray:
        """psi-form eta values: section volumes as a function of the budget."""
        b = self._bins // 2 if coarse else self._bins
        lattice, g_all, g_bbar = self.tables[b]
        budgets = 1.0 - self.domain.residual(pts)
        table = g_all if j == 0 else g_bbar
        out = np.interp(budgets, lattice, table)
        out[budgets < 0] = 0.0
        return out

    def eta_integral(self, j: int, mu: ProperMeasure, region,
                     spec: QuadratureSpec) -> IntegralResult:
        """int_region eta_j dmu over the domain quadrant."""
        if self.kind == "phi":
            ball = self.eta_balls[j]
            if ball is None:
                return ZERO
            return integrate_quadrant(ball, weight=mu.density, region=region, spec=spec)
        fine = integrate_quadrant(
            self.domain, weight=lambda p: mu.density(p) * self.eta_fn(j, p),
            region=region, spec=spec)
        coarse = integrate_quadrant(
            self.domain, weight=lambda p: mu.density(p) * self.eta_fn(j, p, coarse=True),
            region=region, spec=QuadratureSpec(max(spec.nodes // 2, 8), 1, spec.rule,
                                               spec.boundary_subsample))
        return IntegralResult(fine.value,
                              fine.error_estimate + abs(fine.value - coarse.value),
                              fine.nodes_used)

    def eta_slice_integral(self, j: int, mu: ProperMeasure, fixed: dict,
                           spec: QuadratureSpec, region="all") -> IntegralResult:
        """Same with some domain coordinates frozen (integral over the rest);
        the optional region is a box list over the remaining coordinates."""
        n = self.domain.n
        if self.kind == "phi":
            ball = self.eta_balls[j]
            if ball is None:
                return ZERO
            S = ball
            for ax in sorted(fixed, reverse=True):
                S = section_ball(S, ax, fixed[ax])
                if isinstance(S, EmptyBall):
                    return ZERO
            return integrate_quadrant(
                S, weight=lambda rest: mu.density(_embed(rest, fixed, n)),
                region=region, spec=spec)
        S = self.domain
        for ax in sorted(fixed, reverse=True):
            S = section_ball(S, ax, fixed[ax])
            if isinstance(S, EmptyBall):
                return ZERO

        def w(rest, coarse=False):
            full = _embed(rest, fixed, n)
            return mu.density(full) * self.eta_fn(j, full, coarse=coarse)

        fine = integrate_quadrant(S, weight=w, region=region, spec=spec)
        coarse = integrate_quadrant(S, weight=lambda r: w(r, True), region=region,
                                    spec=QuadratureSpec(max(spec.nodes // 2, 8), 1,
                                                        spec.rule, spec.boundary_subsample))
        return IntegralResult(fine.value,
                              fine.error_estimate + abs(fine.value - coarse.value),
                              fine.nodes_used)

    def theta_interval(self, mu: ProperMeasure, fixed: dict, axis_in_rest: int,
                       interval, spec: QuadratureSpec):
        """Slice ratio with the free coordinate confined to an interval:
        the building block of the interval-monotonicity statements."""
        rest_axes = [i for i in range(self.domain.n) if i not in fixed]
        lo = np.zeros(len(rest_axes))
        hi = np.array([float(self.domain.radii[a]) + 1.0 for a in rest_axes])
        lo[axis_in_rest] = interval[0]
        hi[axis_in_rest] = interval[1]
        region = [(lo, hi)]
        den = self.eta_slice_integral(0, mu, fixed, spec, region=region)
        if den.value <= combined_tol(den):
            return None, 0.0
        num = self.eta_slice_integral(1, mu, fixed, spec, region=region)
        r = num.value / den.value
        err = (num.error_estimate + abs(r) * den.error_estimate) / den.value
        return r, err


def _cset_budget_volume(zball: OrliczBall, B: CSet, lattice: np.ndarray) -> np.ndarray:
    """vol(B intersect {sum f_j(z_j) <= b}) for every lattice budget b."""
    hi = zball.box
    boxes = cset_boxes(B.clip(hi), hi)
    out = np.zeros_like(lattice)
    if not boxes:
        return out
    k = zball.n
    for lo, hb in boxes:
        if k == 1:
            ylen = np.clip(zball.inv_axis(0, lattice), lo[0], hb[0]) - lo[0]
            out += np.maximum(ylen, 0.0)
        elif k == 2:
            m = 512
            zs = lo[0] + (np.arange(m) + 0.5) * (hb[0] - lo[0]) / m
            rem = lattice[:, None] - zball.eval_axis(0, zs)[None, :]
            ylen = np.clip(zball.inv_axis(1, np.maximum(rem, -1.0).ravel()).reshape(rem.shape),
                           lo[1], hb[1]) - lo[1]
            ylen[rem < 0] = 0.0
            out += np.maximum(ylen, 0.0).sum(axis=1) * (hb[0] - lo[0]) / m
        else:
            raise ValueError("psi inner blocks limited to <= 2 axes")
    return out


def theta_ratio(inst: ThetaInstance, mu: ProperMeasure, region="all",
                spec: QuadratureSpec = QuadratureSpec(128, 2)):
    """(theta, error) over the region, or (None, 0) when undefined."""
    den = inst.eta_integral(0, mu, region, spec)
    if den.value <= combined_tol(den):
        return None, 0.0
    num = inst.eta_integral(1, mu, region, spec)
    r = num.value / den.value
    err = (num.error_estimate + abs(r) * den.error_estimate) / den.value
    return r, err


# -- the set-level dominance check -------------------------------------------------

def theta_dominance_check(inst: ThetaInstance, mu: ProperMeasure, A: CSet,
                          spec: QuadratureSpec = QuadratureSpec(128, 2),
                          check_id: str = "theta-dominance") -> CheckResult:
    """theta(A) >= theta(K) and theta(K) >= theta(complement of A), each side
    enforced only when defined."""
    tA, eA = theta_ratio(inst, mu, A, spec)
    tK, eK = theta_ratio(inst, mu, "all", spec)
    tC, eC = theta_ratio(inst, mu, ("complement", A), spec)
    if tK is None:
        return CheckResult(check_id, None, 0.0, "vacuous", {"reason": "theta(K) undefined"})
    margins = []
    tols = []
    if tA is not None:
        margins.append(tA - tK)
        tols.append(3.0 * (eA + eK) + 1e-12)
    if tC is not None:
        margins.append(tK - tC)
        tols.append(3.0 * (eK + eC) + 1e-12)
    if not margins:
        return CheckResult(check_id, None, 0.0, "vacuous",
                           {"reason": "both restricted ratios undefined"})
    worst = int(np.argmin([m + t for m, t in zip(margins, tols)]))
    verdict = "pass" if all(m >= -t for m, t in zip(margins, tols)) else "fail"
    return CheckResult(check_id, margins[worst], tols[worst], verdict,
                       {"theta_A": tA, "theta_K": tK, "theta_Abar": tC})


def theta_monotonicity_check(inst: ThetaInstance, mu: ProperMeasure,
                             inner_axes, grid: int = 64,
                             spec: QuadratureSpec = QuadratureSpec(96, 2),
                             edge: float = 0.98,
                             check_id: str = "theta-monotone") -> CheckResult:
    """Slice ratios theta_k(x) on an outer-coordinate grid must not increase
    along any axis (undefined slices are skipped)."""
    n = inst.domain.n
    inner_axes = sorted(inner_axes)
    outer_axes = [i for i in range(n) if i not in inner_axes]
    if not outer_axes:
        raise ValueError("need at least one free coordinate")
    axes_grids = [np.linspace(0.0, edge * float(inst.domain.radii[a]), grid)
                  for a in outer_axes]
    shape = tuple(len(g) for g in axes_grids)
    theta = np.full(shape, np.nan)
    terr = np.zeros(shape)
    for flat in range(int(np.prod(shape))):
        idx = np.unravel_index(flat, shape)
        fixed = {a: axes_grids[k][idx[k]] for k, a in enumerate(outer_axes)}
        den = inst.eta_slice_integral(0, mu, fixed, spec)
        if den.value <= combined_tol(den):
            continue
        num = inst.eta_slice_integral(1, mu, fixed, spec)
        theta[idx] = num.value / den.value
        terr[idx] = (num.error_estimate + abs(theta[idx]) * den.error_estimate) / den.value
    violations = []
    worst = 0.0
    wtol = 1e-12
    for axis in range(len(outer_axes)):
        t0 = np.moveaxis(theta, axis, 0)
        e0 = np.moveaxis(terr, axis, 0)
        for k in range(t0.shape[0] - 1):
            a, b = t0[k], t0[k + 1]
            ea, eb = e0[k], e0[k + 1]
            ok = np.isfinite(a) & np.isfinite(b)
            inc = np.where(ok, b - a, -np.inf)
            tol = 3.0 * (ea + eb) + 1e-12
            bad = inc > tol
            if np.any(bad):
                for j in np.argwhere(bad):
                    violations.append((outer_axes[axis], k, float(inc[tuple(j)])))
            m = float(np.max(inc - tol)) if np.any(ok) else -math.inf
            if m > worst:
                worst = m
                wtol = float(np.max(tol)) if np.ndim(tol) else tol
    margin = -worst
    verdict = "pass" if not violations else "fail"
    if not np.any(np.isfinite(theta)):
        return CheckResult(check_id, None, 0.0, "vacuous", {"reason": "no defined slices"})
    return CheckResult(check_id, margin, wtol, verdict,
                       {"violations": violations, "grid": grid})


def slab_ratio_check(K: OrliczBall, z_axis: int, A: CSet, mu: ProperMeasure | None,
                     grid: int = 64, spec: QuadratureSpec = QuadratureSpec(96, 2),
                     edge: float = 0.98, check_id: str = "slab-ratio") -> CheckResult:
    """The complement-mass fraction of a slice, z -> mu(Abar at z) / mu(all at z),
    must be nonincreasing in the slab coordinate z."""
    R = float(K.radii[z_axis])
    zs = np.linspace(0.0, edge * R, grid)
    ratios = np.full(grid, np.nan)
    errs = np.zeros(grid)
    for k, z in enumerate(zs):
        S = section_ball(K, z_axis, z)
        if isinstance(S, EmptyBall):
            continue
        m = mu if mu is not None else ProperMeasure.lebesgue(S)
        den = integrate_quadrant(S, weight=m.density, spec=spec)
        if den.value <= combined_tol(den):
            continue
        num = integrate_quadrant(S, weight=m.density, region=("complement", A), spec=spec)
        ratios[k] = num.value / den.value
        errs[k] = (num.error_estimate + ratios[k] * den.error_estimate) / den.value
    violations = []
    worst = 0.0
    for k in range(grid - 1):
        if not (np.isfinite(ratios[k]) and np.isfinite(ratios[k + 1])):
            continue
        inc = ratios[k + 1] - ratios[k]
        tol = 3.0 * (errs[k] + errs[k + 1]) + 1e-12
        if inc > tol:
            violations.append((k, float(inc)))
        worst = max(worst, inc - tol)
    verdict = "pass" if not violations else "fail"
    return CheckResult(check_id, -worst, 1e-12, verdict, {"violations": violations})


# -- four-term set inequality -------------------------------------------------------

def four_term_check(K: OrliczBall, A: CSet, axes_I, B: CSet, axes_J,
                    spec: QuadratureSpec = QuadratureSpec(96, 2),
                    escalations: int = 2,
                    check_id: str = "four-term") -> CheckResult:
    """mu(A x Bbar) mu(Abar x B) - mu(A x B) mu(Abar x Bbar) >= -tol on the
    quadrant Lebesgue measure, with refinement escalation near zero margins."""
    axes_I, axes_J = list(axes_I), list(axes_J)
    if set(axes_I) & set(axes_J):
        raise ValueError("index blocks must be disjoint")
    hi = K.box
    hiI = hi[axes_I]
    hiJ = hi[axes_J]
    AI = A.clip(hiI)
    BJ = B.clip(hiJ)

    def measure(useA: bool, useB: bool, sp: QuadratureSpec) -> IntegralResult:
        bi = cset_boxes(AI, hiI, complement=not useA)
        bj = cset_boxes(BJ, hiJ, complement=not useB)
        if not bi or not bj:
            return ZERO
        region = product_boxes([(axes_I, bi), (axes_J, bj)], K.n, hi)
        return integrate_quadrant(K, region=region, spec=sp)

    sp = spec
    for attempt in range(escalations + 1):
        m_ab = measure(True, True, sp)
        m_aB = measure(True, False, sp)
        m_Ab = measure(False, True, sp)
        m_AB = measure(False, False, sp)
        margin = m_aB.value * m_Ab.value - m_ab.value * m_AB.value
        tol = 3.0 * (m_aB.error_estimate * abs(m_Ab.value) + m_Ab.error_estimate * abs(m_aB.value)
                     + m_ab.error_estimate * abs(m_AB.value) + m_AB.error_estimate * abs(m_ab.value)) + 1e-12
        scale = max(m_ab.value + m_aB.value, m_Ab.value + m_AB.value)
        if (m_ab.value + m_aB.value) <= combined_tol(m_ab, m_aB) or \
           (m_Ab.value + m_AB.value) <= combined_tol(m_Ab, m_AB):
            return CheckResult(check_id, margin, tol, "vacuous",
                               {"reason": "degenerate side mass", "scale": scale})
        if margin >= -tol or attempt == escalations:
            break
        sp = QuadratureSpec(sp.nodes * 2, sp.levels, sp.rule, sp.boundary_subsample)
    verdict = "pass" if margin >= -tol else "fail"
    return CheckResult(check_id, margin, tol, verdict,
                       {"masses": (m_ab.value, m_aB.value, m_Ab.value, m_AB.value),
                        "nodes": sp.nodes})


def four_term_check_sampled(batch: SampleBatch, A: CSet, axes_I, B: CSet, axes_J,
                            z: float = 4.0,
                            check_id: str = "four-term-mc") -> CheckResult:
    """Sampled version for n > 4: plug-in product margin with a delta-method SE."""
    X = np.abs(batch.points)
    u = A.membership(X[:, list(axes_I)]).astype(float)
    v = B.membership(X[:, list(axes_J)]).astype(float)
    N = len(u)
    p11 = float(np.mean(u * v))
    p10 = float(np.mean(u * (1 - v)))
    p01 = float(np.mean((1 - u) * v))
    p00 = float(np.mean((1 - u) * (1 - v)))
    margin = p10 * p01 - p11 * p00
    infl = (p01 * (u * (1 - v) - p10) + p10 * ((1 - u) * v - p01)
            - p00 * (u * v - p11) - p11 * ((1 - u) * (1 - v) - p00))
    se = float(np.std(infl, ddof=1) / math.sqrt(N))
    tol = z * se + 1e-12
    if min(p11 + p10, p01 + p00) == 0.0:
        return CheckResult(check_id, margin, tol, "vacuous", {"reason": "degenerate side"})
    verdict = "pass" if margin >= -tol else "fail"
    return CheckResult(check_id, margin, tol, verdict, {"se": se, "N": N})


# -- covariance tests ----------------------------------------------------------------

def covariance_jackknife(u: np.ndarray, v: np.ndarray):
    """Sample covariance and its leave-one-out jackknife standard error."""
    n = len(u)
    su, sv, suv = float(np.sum(u)), float(np.sum(v)), float(np.sum(u * v))
    cov = (suv - su * sv / n) / (n - 1)
    loo = (suv - u * v - (su - u) * (sv - v) / (n - 1)) / (n - 2)
    se = math.sqrt(max((n - 1) / n * float(np.sum((loo - loo.mean()) ** 2)), 0.0))
    return cov, se


def _mcmc_inflation(batch: SampleBatch) -> float:
    acf = batch.meta.get("lag1_autocorr")
    if not acf:
        return 1.0
    rho = min(max(max(acf), 0.0), 0.99)
    return math.sqrt((1.0 + rho) / (1.0 - rho))


def na_covariance_test(batch: SampleBatch, f, axes_I, g, axes_J, z: float = 4.0,
                       check_id: str = "na-cov") -> CheckResult:
    """Cov(f(|X_I|), g(|X_J|)) <= 0 within z standard errors."""
    if set(axes_I) & set(axes_J):
        raise ValueError("index blocks must be disjoint")
    X = np.abs(batch.points)
    u = f(X[:, list(axes_I)])
    v = g(X[:, list(axes_J)])
    if float(np.std(u)) == 0.0 or float(np.std(v)) == 0.0:
        return CheckResult(check_id, 0.0, 0.0, "vacuous", {"reason": "zero variance"})
    cov, se = covariance_jackknife(u, v)
    se *= _mcmc_inflation(batch)
    tol = z * se + 1e-15
    verdict = "pass" if cov <= tol else "fail"
    return CheckResult(check_id, -cov, tol, verdict, {"cov": cov, "se": se})


def signed_covariance_test(batch: SampleBatch, f, axis_i: int, g, axis_j: int,
                           z: float = 4.0, check_id: str = "signed-cov") -> CheckResult:
    """On the full (sign-symmetric) ball, Cov(f(X_i), g(X_j)) must vanish."""
    u = f(batch.points[:, [axis_i]])
    v = g(batch.points[:, [axis_j]])
    cov, se = covariance_jackknife(u, v)
    se *= _mcmc_inflation(batch)
    tol = z * se + 1e-15
    verdict = "pass" if abs(cov) <= tol else "fail"
    return CheckResult(check_id, tol - abs(cov), tol, verdict, {"cov": cov, "se": se})


lp_radius_na_test = na_covariance_test  # identical machinery; f, g radius-wise


# -- Brunn-Minkowski four-point -------------------------------------------------------

@dataclass(frozen=True)
class LogConcaveWeight:
    """Product density prod_i exp(-(q2 z^2 + q1 z + q0 |z|)) on R^k (log-concave
    for q2, q0 >= 0); Lebesgue when all coefficients vanish."""

    coeffs: tuple

    def density(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        out = np.ones(pts.shape[0])
        for i, (q2, q1, q0) in enumerate(self.coeffs):
            z = pts[:, i]
            out = out * np.exp(-(q2 * z * z + q1 * z + q0 * np.abs(z)))
        return out

    @staticmethod
    def lebesgue(k: int) -> "LogConcaveWeight":
        return LogConcaveWeight(tuple((0.0, 0.0, 0.0) for _ in range(k)))


def _full_section_mass(S, nu: LogConcaveWeight, spec: QuadratureSpec) -> IntegralResult:
    """nu-mass of the full (sign-symmetric) section given its quadrant ball."""
    if isinstance(S, EmptyBall):
        return ZERO
    k = S.n
    total = ZERO
    for flat in range(2 ** k):
        signs = np.array([1.0 if (flat >> b) & 1 == 0 else -1.0 for b in range(k)])
        part = integrate_quadrant(S, weight=lambda p: nu.density(p * signs), spec=spec)
        total = total + part
    return total


def bm_four_point_check(K: OrliczBall, ax_x: int, ax_y: int,
                        x1: float, x2: float, y1: float, y2: float,
                        nu: LogConcaveWeight | None = None,
                        spec: QuadratureSpec = QuadratureSpec(128, 2),
                        check_id: str = "bm-four-point") -> CheckResult:
    """nu(K_{x1,y2}) nu(K_{x2,y1}) >= nu(K_{x1,y1}) nu(K_{x2,y2}) for sections
    at x1 <= x2, y1 <= y2 and a log-concave section weight."""
    if not (x1 <= x2 and y1 <= y2):
        raise ValueError("need x1 <= x2 and y1 <= y2")
    if K.n < 3:
        raise ValueError("need n >= 3 for nontrivial sections")
    if nu is None:
        nu = LogConcaveWeight.lebesgue(K.n - 2)

    def mass(xv, yv) -> IntegralResult:
        S = section_ball(K, ax_y, yv)
        if isinstance(S, EmptyBall):
            return ZERO
        ax2 = ax_x if ax_x < ax_y else ax_x - 1
        S = section_ball(S, ax2, xv)
        return _full_section_mass(S, nu, spec)

    m11 = mass(x1, y1)
    m12 = mass(x1, y2)
    m21 = mass(x2, y1)
    m22 = mass(x2, y2)
    margin = m12.value * m21.value - m11.value * m22.value
    tol = 3.0 * (m12.error_estimate * abs(m21.value) + m21.error_estimate * abs(m12.value)
                 + m11.error_estimate * abs(m22.value) + m22.error_estimate * abs(m11.value)) + 1e-12
    if max(m11.value, m12.value, m21.value, m22.value) <= combined_tol(m11, m12, m21, m22):
        return CheckResult(check_id, margin, tol, "vacuous", {"reason": "all sections empty"})
    verdict = "pass" if margin >= -tol else "fail"
    return CheckResult(check_id, margin, tol, verdict,
                       {"masses": (m11.value, m12.value, m21.value, m22.value)})


# -- lp section inequalities -----------------------------------------------------------

@dataclass(frozen=True)
class RadiusSet:
    """Sublevel set {x : rho(|x|) <= level} of a radius-wise increasing rho."""

    rho: object
    level: float

    def membership(self, pts) -> np.ndarray:
        return self.rho(np.abs(np.atleast_2d(pts))) <= self.level


def _cone_quadrant_params(p: float, m: int = 512):
    """Nodes/weights for cone-measure integrals over the quadrant arc of the
    2-D lp sphere: split at the symmetry point so the density stays bounded."""
    xmid = 0.5 ** (1.0 / p)
    t = (np.arange(m) + 0.5) * xmid / m
    w = (1.0 - t ** p) ** (1.0 / p - 1.0) * (xmid / m)
    pts_lower = np.column_stack([t, (1.0 - t ** p) ** (1.0 / p)])
    return pts_lower, w


def _cone_fraction(A, p: float, k: int, radii: np.ndarray) -> np.ndarray:
    """g_A(r): cone-measure fraction of the direction sphere landing in A at
    radius r (quadrant symmetry; normalization cancels in the inequalities)."""
    radii = np.asarray(radii)
    if k == 1:
        return A.membership(radii[:, None]).astype(float)
    if k != 2:
        raise ValueError("cone fractions implemented for blocks of 1 or 2 axes")
    pts, w = _cone_quadrant_params(p)
    both = np.concatenate([pts, pts[:, ::-1]])
    ww = np.concatenate([w, w])
    out = np.empty(len(radii))
    for i, r in enumerate(radii):
        out[i] = float(np.sum(ww * A.membership(r * both)))
    return out / (2.0 * np.sum(w))


def _radial_block_integral(B, dens, p: float, k: int, radii: np.ndarray,
                           m: int = 256) -> tuple:
    """f_B(r) = int over the k-dim block of 1_B(y) m(r^p + ||y||_p^p) dy
    (quadrant form) and the matching full-block integral f_all(r)."""
    if dens.kind == "indicator":
        ymax = dens.r0 ** (1.0 / p)
    elif dens.kind == "exp":
        ymax = 40.0 ** (1.0 / p)
    else:
        ymax = (8.0 * dens.sigma) ** (1.0 / p)
    rp = radii ** p
    if k == 1:
        ys = (np.arange(m) + 0.5) * ymax / m
        inB = B.membership(ys[:, None]).astype(float)
        mv = dens.m(rp[:, None] + ys[None, :] ** p)
        h = ymax / m
        return (mv * inB[None, :]).sum(axis=1) * h, mv.sum(axis=1) * h
    if k != 2:
        raise ValueError("radial block integrals implemented for 1 or 2 axes")
    ys = (np.arange(m) + 0.5) * ymax / m
    Y1, Y2 = np.meshgrid(ys, ys, indexing="ij")
    pts = np.column_stack([Y1.ravel(), Y2.ravel()])
    inB = B.membership(pts).astype(float)
    sp = (Y1 ** p + Y2 ** p).ravel()
    h2 = (ymax / m) ** 2
    fB = np.empty(len(radii))
    fall = np.empty(len(radii))
    for i, r in enumerate(rp):
        mv = dens.m(r + sp)
        fB[i] = float(np.sum(mv * inB)) * h2
        fall[i] = float(np.sum(mv)) * h2
    return fB, fall


def _pair_margin(fa: np.ndarray, fb: np.ndarray) -> float:
    """min over r1 >= r2 of fa(r1) fb(r2) - fa(r2) fb(r1) (monotone-ratio form)."""
    worst = math.inf
    for i in range(len(fa)):
        for j in range(i + 1):
            worst = min(worst, fa[i] * fb[j] - fa[j] * fb[i])
    return worst


def lp_section_inequalities(p: float, n: int, k: int, dens, A: RadiusSet, B: RadiusSet,
                            grid: int = 24, rmax: float | None = None) -> list:
    """The four radial/cone inequalities behind the lp negative-association proof.

    A lives on the first k axes, B on the remaining n - k.  Returns one
    CheckResult per inequality family, evaluated on an r-grid of pairs.
    """
    if rmax is None:
        if dens.kind == "indicator":
            rmax = dens.r0 ** (1.0 / p)
        elif dens.kind == "exp":
            rmax = 40.0 ** (1.0 / p)
        else:
            rmax = (8.0 * dens.sigma) ** (1.0 / p)
    radii = np.linspace(0.0, rmax, grid)
    out = []

    fB, fall = _radial_block_integral(B, dens, p, n - k, radii)
    fBbar = fall - fB
    m4 = _pair_margin(fB, fBbar)
    scale4 = max(float(np.max(fall)) ** 2, 1e-300)
    out.append(CheckResult("lp-ineq-radial-density", m4, 1e-9 * scale4,
                           "pass" if m4 >= -1e-9 * scale4 else "fail", {}))

    gA = _cone_fraction(A, p, k, radii)
    gAbar = 1.0 - gA
    m5 = _pair_margin(gAbar, gA)          # g_A(r1) g_Abar(r2) <= g_A(r2) g_Abar(r1)
    out.append(CheckResult("lp-ineq-cone-A", m5, 1e-9,
                           "pass" if m5 >= -1e-9 else "fail", {}))

    worst6 = math.inf
    svals = np.linspace(0.0, rmax, grid) ** p
    rvals = radii ** p
    for i1 in range(grid):
        for i2 in range(i1 + 1):
            for j1 in range(grid):
                for j2 in range(j1 + 1):
                    lhs = dens.m(rvals[i1] + svals[j1]) * dens.m(rvals[i2] + svals[j2])
                    rhs = dens.m(rvals[i2] + svals[j1]) * dens.m(rvals[i1] + svals[j2])
                    worst6 = min(worst6, float(rhs - lhs))
    tol6 = 1e-12
    out.append(CheckResult("lp-ineq-logconcave-cross", worst6, tol6,
                           "pass" if worst6 >= -tol6 else "fail", {}))

    qB = _cone_fraction(B, p, n - k, radii)
    qBbar = 1.0 - qB
    m7 = _pair_margin(qBbar, qB)
    out.append(CheckResult("lp-ineq-cone-B", m7, 1e-9,
                           "pass" if m7 >= -1e-9 else "fail", {}))
    return out


# -- moment comparison ------------------------------------------------------------------

def _even_multi_indices(n: int, p: int):
    """All multi-indices with even entries summing to p."""
    if n == 1:
        if p % 2 == 0:
            yield (p,)
        return
    for head in range(0, p + 1, 2):
        for rest in _even_multi_indices(n - 1, p - head):
            yield (head, *rest)


def moment_compare(K: OrliczBall, a, p: int,
                   spec: QuadratureSpec = QuadratureSpec(128, 2),
                   batch: SampleBatch | None = None, seed: int = 0,
                   check_id: str = "moment-compare") -> CheckResult:
    """E (sum a_i X_i)^p <= the same moment with independent copies (even p).

    Quadrature mode expands both sides into even-moment products (odd powers
    vanish by symmetry); sampled mode compares the batch with its
    coordinate-wise independent resample.
    """
    if p % 2 != 0 or p < 2:
        raise ValueError("p must be an even positive integer")
    a = np.asarray(a, dtype=np.float64)
    if batch is not None:
        s_dep = (batch.points @ a) ** p
        s_ind = (independent_copies(batch, seed).points @ a) ** p
        lhs, rhs = float(np.mean(s_dep)), float(np.mean(s_ind))
        se = math.sqrt(np.var(s_dep, ddof=1) / len(s_dep) + np.var(s_ind, ddof=1) / len(s_ind))
        tol = 4.0 * se + 1e-12
        verdict = "pass" if lhs <= rhs + tol else "fail"
        return CheckResult(check_id, rhs - lhs, tol, verdict, {"lhs": lhs, "rhs": rhs})
    vol = integrate_quadrant(K, spec=spec)
    mono_cache = {}

    def moment(alpha) -> IntegralResult:
        key = tuple(alpha)
        if key not in mono_cache:
            expo = np.asarray(alpha, dtype=np.float64)

            def w(pts, expo=expo):
                return np.prod(pts ** expo, axis=1)

            mono_cache[key] = integrate_quadrant(K, weight=w, spec=spec)
        return mono_cache[key]

    lhs = rhs = 0.0
    lerr = rerr = 0.0
    for alpha in _even_multi_indices(K.n, p):
        coef = math.factorial(p)
        for e in alpha:
            coef //= math.factorial(e)
        coef *= float(np.prod(a ** np.asarray(alpha)))
        if coef == 0.0:
            continue
        joint = moment(alpha)
        lhs += coef * joint.value / vol.value
        lerr += abs(coef) * (joint.error_estimate + vol.error_estimate) / vol.value
        prod = 1.0
        perr = 0.0
        for i, e in enumerate(alpha):
            if e == 0:
                continue
            marg = moment(tuple(e if j == i else 0 for j in range(K.n)))
            prev = prod
            prod *= marg.value / vol.value
            perr = perr * (marg.value / vol.value) + abs(prev) * (
                marg.error_estimate + vol.error_estimate) / vol.value
        rhs += coef * prod
        rerr += abs(coef) * perr
    tol = 3.0 * (lerr + rerr) + 1e-12
    verdict = "pass" if lhs <= rhs + tol else "fail"
    return CheckResult(check_id, rhs - lhs, tol, verdict, {"lhs": lhs, "rhs": rhs})
