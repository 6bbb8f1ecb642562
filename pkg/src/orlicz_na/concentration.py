"""Isotropic normalization and maximal-inequality tail bounds.

The normalization is diagonal (exact for 1-symmetric bodies): per-axis second
moments are computed deterministically through the budget-convolution tables,
the ball is rescaled so they are equal, and a global scale brings the volume
to one.  The tail bound is the negative-association maximal inequality with
the variance term 5 L^4 of log-concave marginals baked in and the cube-root
choice of the truncation level a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quadrature import all_axis_moments, budget_volume
from .samplers import SampleBatch, sample_hit_and_run, sample_rejection
from .verify import CheckResult
from .young import OrliczBall, _pre_affine


@dataclass
class IsotropicReport:
    scale: np.ndarray            # per-axis multipliers applied to coordinates
    volume_scalar: float         # global factor included in `scale`
    L2: float                    # common second moment after rescaling
    residual_spread: float       # relative spread of sampled second moments
    volume_estimate: float       # volume of the rescaled ball (target 1)
    volume_ci: float
    moment_se: np.ndarray = field(default_factory=lambda: np.empty(0))


def scale_ball(K: OrliczBall, factors) -> OrliczBall:
    """Ball of the coordinates u_i = factors_i * x_i (exact Young rescale)."""
    factors = np.asarray(factors, dtype=np.float64)
    return OrliczBall([_pre_affine(f, 1.0 / factors[i], 0.0)
                       for i, f in enumerate(K.young)])


def isotropize(K: OrliczBall, sample_budget: int = 50000, seed: int = 0,
               bins: int = 4096):
    """Rescaled ball with equal per-axis second moments and unit volume.

    Moments and volume come from the deterministic convolution tables (valid
    in any dimension); the sample budget is spent on an independent sanity
    estimate whose spread is reported.
    """
    n = K.n
    vol = budget_volume(K, bins)
    m2_raw, _ = all_axis_moments(K, 2.0, bins)
    m2 = m2_raw / vol.value
    s = 1.0 / np.sqrt(m2)
    # isotropic position fixes the full-ball volume: lambda_n(K) = 2^n * quadrant
    log_vol_full = math.log(vol.value) + n * math.log(2.0) + float(np.sum(np.log(s)))
    gamma = math.exp(-log_vol_full / n)
    factors = gamma * s
    ball = scale_ball(K, factors)
    v2 = budget_volume(ball, bins)
    L2 = gamma * gamma

    vol_full = v2.value * 2.0 ** n

    spread = 0.0
    ses = np.empty(0)
    if sample_budget > 0:
        batch = _default_sampler(ball, sample_budget, seed)
        sq = batch.points ** 2
        est = sq.mean(axis=0)
        ses = sq.std(axis=0, ddof=1) / math.sqrt(len(batch))
        spread = float(np.max(np.abs(est - L2)) / L2)
    return ball, IsotropicReport(
        scale=factors, volume_scalar=gamma, L2=L2, residual_spread=spread,
        volume_estimate=vol_full,
        volume_ci=3.0 * v2.error_estimate * 2.0 ** n + 1e-9,
        moment_se=ses)


def _default_sampler(K: OrliczBall, N: int, seed: int) -> SampleBatch:
    """Rejection when feasible, hit-and-run otherwise (quadrant points)."""
    try:
        return sample_rejection(K, N, seed)
    except RuntimeError:
        return sample_hit_and_run(K, N, seed, burn_in=1000)


# -- bounds -----------------------------------------------------------------------

def shao_maximal_bound(x: float, a: float, alpha: float, B_n: float,
                       tail_term: float) -> float:
    """Maximal-partial-sum tail bound for negatively associated, mean-zero
    variables: 2 P(max |X_k| > a) + (2/(1-alpha)) exp(-x^2 alpha / (2(ax+B_n))
    * (1 + 2/3 ln(1 + ax/B_n)))."""
    if not (x > 0 and a > 0 and 0 < alpha < 1 and B_n >= 0 and 0 <= tail_term <= 1):
        raise ValueError("parameter out of range")
    expo = -(x * x * alpha) / (2.0 * (a * x + B_n)) * (
        1.0 + (2.0 / 3.0) * math.log1p(a * x / B_n))
    return 2.0 * tail_term + 2.0 / (1.0 - alpha) * math.exp(expo)


def default_truncation(n: int, t: float) -> float:
    """Cube-root truncation level a = (n^2 t^2)^(1/3)."""
    return (n * n * t * t) ** (1.0 / 3.0)


def orlicz_tail_bound(n: int, L2: float, t: float, tail_term: float,
                      a: float | None = None) -> float:
    """P(|sum X_i^2 / n - L2| > t) bound for an isotropic Orlicz ball:
    2 P(max |X_k^2 - L2| > a) + 4 exp(-n t^2/(4(at + 5 L2^2))
    * (1 + 2/3 ln(1 + at/(5 L2^2)))), capped at 1 (vacuous above)."""
    if t <= 0:
        return 1.0
    if a is None:
        a = default_truncation(n, t)
    L4 = 5.0 * L2 * L2
    expo = -(n * t * t) / (4.0 * (a * t + L4)) * (
        1.0 + (2.0 / 3.0) * math.log1p(a * t / L4))
    return min(2.0 * tail_term + 4.0 * math.exp(expo), 1.0)


# -- empirical tails ----------------------------------------------------------------

def wilson_interval(k: int, n: int, z: float = 3.0):
    """Wilson score interval for a binomial proportion."""
    if n == 0:
        return 0.0, 1.0
    p = k / n
    den = 1.0 + z * z / n
    mid = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return max(mid - half, 0.0), min(mid + half, 1.0)


@dataclass
class TailCurve:
    t: np.ndarray
    empirical: np.ndarray
    ci_lo: np.ndarray
    ci_hi: np.ndarray
    bound: np.ndarray


def empirical_tail(batch: SampleBatch, L2: float, t_grid) -> TailCurve:
    """P(|mean of X_i^2 - L2| > t) with Wilson intervals, and the matching
    bound evaluated with the empirical max-term tail."""
    pts = batch.points
    N, n = pts.shape
    sq = pts * pts
    stat = np.abs(sq.mean(axis=1) - L2)
    maxdev = np.abs(sq - L2).max(axis=1)
    t_grid = np.asarray(t_grid, dtype=np.float64)
    emp = np.empty(len(t_grid))
    lo = np.empty(len(t_grid))
    hi = np.empty(len(t_grid))
    bound = np.empty(len(t_grid))
    for k, t in enumerate(t_grid):
        exceed = int(np.sum(stat > t))
        emp[k] = exceed / N
        lo[k], hi[k] = wilson_interval(exceed, N)
        if t <= 0:
            bound[k] = 1.0
            continue
        a = default_truncation(n, t)
        tail_k = int(np.sum(maxdev > a))
        _, tail_hi = wilson_interval(tail_k, N)
        bound[k] = orlicz_tail_bound(n, L2, float(t), tail_hi)
    return TailCurve(t_grid, emp, lo, hi, bound)


def domination_check(curve: TailCurve, check_id: str = "tail-domination") -> CheckResult:
    """Empirical upper CI must sit below the bound at every grid point."""
    gap = curve.bound - curve.ci_hi
    worst = float(np.min(gap))
    verdict = "pass" if worst >= 0.0 else "fail"
    return CheckResult(check_id, worst, 0.0, verdict,
                       {"worst_t": float(curve.t[int(np.argmin(gap))])})


def moment_comparability_check(batch: SampleBatch, L2: float,
                               check_id: str = "fourth-moment") -> CheckResult:
    """Log-concave marginal sanity: E X_i^4 - L2^2 <= 5 L2^2, with CI slack."""
    sq = batch.points ** 2
    m4 = (sq * sq).mean(axis=0)
    se = (sq * sq).std(axis=0, ddof=1) / math.sqrt(len(batch))
    margin = float(np.min(6.0 * L2 * L2 - (m4 - 3.0 * se)))
    verdict = "pass" if margin >= 0 else "fail"
    return CheckResult(check_id, margin, float(3.0 * np.max(se)), verdict,
                       {"max_m4": float(np.max(m4))})
