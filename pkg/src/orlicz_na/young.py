"""Young functions and generalized Orlicz balls.

A Young function here is a convex nondecreasing map f: [0, inf) -> [0, inf]
with f(0) = 0, stored as a piecewise list of segments.  Each segment holds a
constant plus a sum of shifted power terms

    f(x) = c0 + sum_m  s_m * (x - a_m)**p_m        (a_m <= segment start)

which is closed, exactly, under the three transforms the ball constructions
need: pre-composition with an affine map x -> lam*x + c (lam > 0), post-affine
maps f -> (f - c) * m, and pointwise addition of two functions (breakpoint
merge).  Beyond ``fin_end`` the value is +inf; the value at ``fin_end`` itself
is the finite left limit, so membership sets stay closed.

Infinity is IEEE +inf throughout: inf + a = inf and inf > any finite number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import impl as _impl

INF = math.inf

# power evaluation rule shared with the kernels: p == 1 and p == 2 are exact,
# everything else goes through exp/log so both backends agree to the ulp level
def _powx(dx: float, p: float) -> float:
    if dx <= 0.0:
        return 0.0
    if p == 1.0:
        return dx
    if p == 2.0:
        return dx * dx
    return math.exp(p * math.log(dx))


@dataclass(frozen=True)
class Segment:
    x0: float
    c0: float
    terms: tuple[tuple[float, float, float], ...]  # (scale, power, anchor)

    def value(self, x: float) -> float:
        acc = self.c0
        for s, p, a in self.terms:
            acc += s * _powx(x - a, p)
        return acc

    def slope(self, x: float) -> float:
        acc = 0.0
        for s, p, a in self.terms:
            if p == 1.0:
                acc += s
            else:
                acc += s * p * _powx(x - a, p - 1.0)
        return acc


class YoungFunction:
    """Piecewise representation of a Young function."""

    __slots__ = ("segments", "fin_end", "_starts")

    def __init__(self, segments: tuple[Segment, ...], fin_end: float = INF):
        if not segments or segments[0].x0 != 0.0:
            raise ValueError("segments must start at x = 0")
        self.segments = segments
        self.fin_end = float(fin_end)
        starts = [seg.x0 for seg in segments]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if math.isfinite(fin_end) and fin_end < starts[-1]:
            raise ValueError("fin_end before last breakpoint")
        object.__setattr__(self, "_starts", np.asarray(starts))

    def __setattr__(self, name, value):
        if name in self.__slots__ and hasattr(self, "_starts"):
            raise AttributeError("YoungFunction is immutable")
        object.__setattr__(self, name, value)

    # -- constructors -----------------------------------------------------

    @staticmethod
    def power(p: float, scale: float = 1.0) -> "YoungFunction":
        """f(x) = scale * x**p on all of [0, inf)."""
        if p < 1.0 or scale <= 0.0:
            raise ValueError("need p >= 1 and scale > 0")
        return YoungFunction((Segment(0.0, 0.0, ((float(scale), float(p), 0.0),)),))

    @staticmethod
    def piecewise_linear(points) -> "YoungFunction":
        """Linear interpolation of (x, value) pairs; value may be inf at the end.

        The last finite piece is extended with its own slope beyond the last
        breakpoint.  A trailing (x, inf) point makes the function +inf for
        x > that breakpoint (the value at the breakpoint is the left limit).
        """
        pts = [(float(x), float(y)) for x, y in points]
        if not pts or pts[0][0] != 0.0:
            raise ValueError("first point must be at x = 0")
        fin_end = INF
        if math.isinf(pts[-1][1]):
            fin_end = pts[-1][0]
            pts = pts[:-1]
            if not pts:
                raise ValueError("need at least one finite point")
        if any(math.isinf(y) for _, y in pts):
            raise ValueError("inf only allowed as the final value")
        segs = []
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x1 <= x0:
                raise ValueError("x coordinates must be strictly increasing")
            slope = (y1 - y0) / (x1 - x0)
            terms = ((slope, 1.0, x0),) if slope != 0.0 else ()
            segs.append(Segment(x0, y0, terms))
        if math.isfinite(fin_end):
            if fin_end < pts[-1][0]:
                raise ValueError("inf breakpoint before last finite point")
            if fin_end > pts[-1][0] or not segs:
                # keep the final slope up to the jump (flat only for a lone point)
                if len(pts) >= 2:
                    (x0, y0), (x1, y1) = pts[-2], pts[-1]
                    slope = (y1 - y0) / (x1 - x0)
                    terms = ((slope, 1.0, x1),) if slope != 0.0 else ()
                    segs.append(Segment(x1, y1, terms))
                else:
                    segs.append(Segment(pts[-1][0], pts[-1][1], ()))
        else:
            # extend final slope to infinity
            if len(pts) == 1:
                segs.append(Segment(pts[-1][0], pts[-1][1], ()))
            else:
                (x0, y0), (x1, y1) = pts[-2], pts[-1]
                slope = (y1 - y0) / (x1 - x0)
                terms = ((slope, 1.0, x1),) if slope != 0.0 else ()
                segs.append(Segment(x1, y1, terms))
        return YoungFunction(tuple(segs), fin_end)

    @staticmethod
    def flat_then_inf(width: float) -> "YoungFunction":
        """Cube factor: 0 on [0, width], +inf after."""
        if width < 0:
            raise ValueError("width must be >= 0")
        return YoungFunction((Segment(0.0, 0.0, ()),), fin_end=width)

    # -- evaluation --------------------------------------------------------

    def _segment_at(self, x: float) -> Segment:
        k = int(np.searchsorted(self._starts, x, side="right")) - 1
        return self.segments[max(k, 0)]

    def __call__(self, x: float) -> float:
        if x < 0:
            raise ValueError("Young functions live on [0, inf)")
        if x > self.fin_end:
            return INF
        return self._segment_at(min(x, self.fin_end)).value(x)

    def inverse(self, budget: float) -> float:
        """sup{x : f(x) <= budget}; -1 when the set is empty (budget < 0)."""
        if budget < 0:
            return -1.0
        for k, seg in enumerate(self.segments):
            hi = self.segments[k + 1].x0 if k + 1 < len(self.segments) else self.fin_end
            if math.isfinite(hi):
                yend = seg.value(hi)
            else:
                yend = seg.c0 if not seg.terms else INF
            if yend <= budget:
                continue
            # crossing inside this segment
            if not seg.terms:
                return seg.x0
            if len(seg.terms) == 1:
                s, p, a = seg.terms[0]
                dx = max((budget - seg.c0) / s, 0.0)
                if p == 1.0:
                    x = a + dx
                elif p == 2.0:
                    x = a + math.sqrt(dx)
                else:
                    x = a + (math.exp(math.log(dx) / p) if dx > 0 else 0.0)
            else:
                hi2 = hi
                if not math.isfinite(hi2):
                    hi2 = max(seg.x0 * 2.0, seg.x0 + 1.0)
                    while seg.value(hi2) <= budget:
                        hi2 = hi2 * 2.0 + 1.0
                lo2 = seg.x0
                for _ in range(80):
                    mid = 0.5 * (lo2 + hi2)
                    if seg.value(mid) <= budget:
                        lo2 = mid
                    else:
                        hi2 = mid
                x = lo2
            if math.isfinite(hi):
                x = min(x, hi)
            return max(x, seg.x0)
        return self.fin_end

    def right_slope(self, x: float) -> float:
        """Right-hand derivative; +inf at a jump to infinity."""
        if x >= self.fin_end:
            return INF
        k = int(np.searchsorted(self._starts, x, side="right")) - 1
        seg = self.segments[max(k, 0)]
        # at a breakpoint the next segment rules the right derivative
        if k + 1 < len(self.segments) and x == self.segments[k + 1].x0:
            seg = self.segments[k + 1]
        return seg.slope(x)

    def zero_end(self) -> float:
        """sup{x : f(x) = 0} (0 when f is positive off the origin)."""
        return self.inverse(0.0)

    @property
    def is_proper(self) -> bool:
        return math.isinf(self.fin_end) and self.zero_end() == 0.0

    def probe_high(self) -> float:
        """A finite x value useful as the right end of validation grids."""
        if math.isfinite(self.fin_end):
            return max(self.fin_end, 1e-9)
        r = self.inverse(4.0)
        hi = max(float(self._starts[-1]) * 2.0, 1.0)
        return max(r, hi) if math.isfinite(r) else hi

    def __repr__(self):
        return f"YoungFunction({len(self.segments)} segments, fin_end={self.fin_end})"


# -- validation -------------------------------------------------------------

@dataclass
class ValidationReport:
    ok: bool
    failures: list = field(default_factory=list)

    def add(self, name: str, detail):
        self.ok = False
        self.failures.append((name, detail))


def validate_young(f: YoungFunction, grid_points: int = 129) -> ValidationReport:
    """Check the defining invariants on a grid; reports all failures."""
    rep = ValidationReport(ok=True)
    if f(0.0) != 0.0:
        rep.add("f(0)=0", f(0.0))
    hi = f.probe_high()
    grid = np.union1d(np.linspace(0.0, hi, grid_points), f._starts)
    grid = grid[grid <= f.fin_end]
    vals = np.array([f(x) for x in grid])
    if np.any(np.diff(vals) < -1e-12 * np.maximum(1.0, np.abs(vals[:-1]))):
        k = int(np.argmax(np.diff(vals) < 0))
        rep.add("nondecreasing", (grid[k], grid[k + 1]))
    # midpoint convexity on consecutive grid triples
    for k in range(len(grid) - 2):
        a, b = grid[k], grid[k + 2]
        mid = f((a + b) / 2.0)
        rhs = (vals[k] + vals[k + 2]) / 2.0
        if mid > rhs + 1e-12 * max(1.0, abs(rhs)):
            rep.add("midpoint-convexity", (a, (a + b) / 2.0, b))
            break
    if not np.any(vals > 0) and math.isinf(f.fin_end):
        rep.add("not-identically-zero", None)
    if f.fin_end <= 0.0:
        rep.add("finite-somewhere-off-zero", f.fin_end)
    return rep


def young_eval(f: YoungFunction, x: float) -> float:
    """Piecewise evaluation; exact at breakpoints."""
    return f(x)


# -- Orlicz balls -------------------------------------------------------------

class EmptyBall:
    """Distinct result of a restriction that removed everything."""

    is_empty = True

    def __repr__(self):
        return "EmptyBall()"


EMPTY = EmptyBall()


@dataclass
class BallCode:
    """Flat array encoding consumed by the compiled / fallback kernels."""

    n: int
    func_ptr: np.ndarray
    seg_x0: np.ndarray
    seg_c0: np.ndarray
    term_ptr: np.ndarray
    term_s: np.ndarray
    term_p: np.ndarray
    term_a: np.ndarray
    fin_end: np.ndarray


def _encode(young) -> BallCode:
    func_ptr = [0]
    seg_x0, seg_c0, term_ptr, ts, tp, ta = [], [], [0], [], [], []
    for f in young:
        for seg in f.segments:
            seg_x0.append(seg.x0)
            seg_c0.append(seg.c0)
            for s, p, a in seg.terms:
                ts.append(s)
                tp.append(p)
                ta.append(a)
            term_ptr.append(len(ts))
        func_ptr.append(len(seg_x0))
    return BallCode(
        n=len(young),
        func_ptr=np.asarray(func_ptr, dtype=np.int64),
        seg_x0=np.asarray(seg_x0, dtype=np.float64),
        seg_c0=np.asarray(seg_c0, dtype=np.float64),
        term_ptr=np.asarray(term_ptr, dtype=np.int64),
        term_s=np.asarray(ts, dtype=np.float64),
        term_p=np.asarray(tp, dtype=np.float64),
        term_a=np.asarray(ta, dtype=np.float64),
        fin_end=np.asarray([f.fin_end for f in young], dtype=np.float64),
    )


class OrliczBall:
    """{x : sum_i f_i(|x_i|) <= 1} for Young functions f_i."""

    is_empty = False

    def __init__(self, young):
        self.young = tuple(young)
        if not self.young:
            raise ValueError("need at least one Young function")
        self.n = len(self.young)
        self._code = None
        self._radii = None

    @property
    def code(self) -> BallCode:
        if self._code is None:
            self._code = _encode(self.young)
        return self._code

    @property
    def radii(self) -> np.ndarray:
        """Axis radii R_i = sup{x : f_i(x) <= 1}."""
        if self._radii is None:
            self._radii = np.array([f.inverse(1.0) for f in self.young])
        return self._radii

    @property
    def box(self) -> np.ndarray:
        return self.radii

    def eval_axis(self, i: int, xs) -> np.ndarray:
        return _impl.eval_axis(self.code, i, np.ascontiguousarray(xs, dtype=np.float64))

    def inv_axis(self, i: int, budgets) -> np.ndarray:
        return _impl.finv_axis(self.code, i, np.ascontiguousarray(budgets, dtype=np.float64))

    def residual(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.ascontiguousarray(points, dtype=np.float64))
        if pts.shape[1] != self.n:
            raise ValueError(f"expected points in R^{self.n}, got {pts.shape[1]}")
        return _impl.residual(self.code, pts)

    def membership(self, points):
        """True iff sum f_i(|x_i|) <= 1 (closed ball); quadrant-symmetric."""
        res = self.residual(points) <= 1.0
        if np.ndim(points) == 1:
            return bool(res[0])
        return res

    def __repr__(self):
        return f"OrliczBall(n={self.n})"


def membership(ball: OrliczBall, x) -> bool:
    out = ball.membership(np.asarray(x, dtype=float))
    return out


# -- exact transform helpers ---------------------------------------------------

def _segments_window(f: YoungFunction, lo: float, hi: float):
    """Segments of f covering [lo, hi], re-cut so the first starts at lo."""
    out = []
    for k, seg in enumerate(f.segments):
        nxt = f.segments[k + 1].x0 if k + 1 < len(f.segments) else INF
        if nxt <= lo or seg.x0 >= hi:
            continue
        start = max(seg.x0, lo)
        out.append(Segment(start, seg.c0, seg.terms))
    return out


def _shift_clip(f: YoungFunction, x_a: float, width: float) -> YoungFunction:
    """g(u) = f(u + x_a) on [0, width], +inf beyond."""
    hi = min(x_a + width, f.fin_end)
    segs = []
    for seg in _segments_window(f, x_a, hi):
        terms = tuple((s, p, a - x_a) for s, p, a in seg.terms)
        segs.append(Segment(max(seg.x0 - x_a, 0.0), seg.c0, terms))
    fin = min(width, f.fin_end - x_a)
    if not segs:
        segs = [Segment(0.0, f(x_a), ())]
    return YoungFunction(tuple(segs), max(fin, 0.0))


def _post_affine(f: YoungFunction, sub: float, mul: float) -> YoungFunction:
    """g = (f - sub) * mul with mul > 0."""
    segs = tuple(
        Segment(seg.x0, (seg.c0 - sub) * mul,
                tuple((s * mul, p, a) for s, p, a in seg.terms))
        for seg in f.segments
    )
    return YoungFunction(segs, f.fin_end)


def _pre_affine(f: YoungFunction, lam: float, c: float) -> YoungFunction:
    """g(t) = f(lam*t + c) for lam > 0, c >= 0, as an exact piecewise function."""
    segs = []
    for k, seg in enumerate(f.segments):
        nxt = f.segments[k + 1].x0 if k + 1 < len(f.segments) else INF
        if nxt <= c:
            continue
        t0 = max((seg.x0 - c) / lam, 0.0)
        terms = tuple((s * _powx(lam, p), p, (a - c) / lam) for s, p, a in seg.terms)
        segs.append(Segment(t0, seg.c0, terms))
    fin = (f.fin_end - c) / lam if math.isfinite(f.fin_end) else INF
    if not segs:
        segs = [Segment(0.0, f(c), ())]
    return YoungFunction(tuple(segs), max(fin, 0.0))


def _add(f: YoungFunction, g: YoungFunction) -> YoungFunction:
    fin = min(f.fin_end, g.fin_end)
    starts = sorted({0.0}
                    | {seg.x0 for seg in f.segments if seg.x0 < fin or seg.x0 == 0.0}
                    | {seg.x0 for seg in g.segments if seg.x0 < fin or seg.x0 == 0.0})
    segs = []
    for x0 in starts:
        sf = f._segment_at(min(x0, f.fin_end))
        sg = g._segment_at(min(x0, g.fin_end))
        segs.append(Segment(x0, sf.c0 + sg.c0, sf.terms + sg.terms))
    return YoungFunction(tuple(segs), fin)


def _add_const(f: YoungFunction, c: float) -> YoungFunction:
    segs = tuple(Segment(s.x0, s.c0 + c, s.terms) for s in f.segments)
    return YoungFunction(segs, f.fin_end)


def _snap_zero(f: YoungFunction) -> YoungFunction:
    """Subtract the fp residue so that f(0) is exactly 0."""
    v0 = f(0.0)
    if v0 == 0.0:
        return f
    return _add_const(f, -v0)


# -- exact geometric constructions ----------------------------------------------

def restrict_interval(K: OrliczBall, i: int, interval):
    """Ball K' whose quadrant, shifted by x_a along axis i, equals
    K+ intersected with {x_i in [x_a, x_b]}; EMPTY when that slab misses K."""
    x_a, x_b = float(interval[0]), float(interval[1])
    if not (0.0 <= x_a < x_b):
        raise ValueError("need 0 <= x_a < x_b")
    f_i = K.young[i]
    c = f_i(x_a)
    if c > 1.0:
        return EMPTY
    young = list(K.young)
    if c == 1.0:
        # only the flat part of {f_i = 1} survives; everything else pinned to 0
        w = min(f_i.inverse(1.0), x_b) - x_a
        young[i] = YoungFunction.flat_then_inf(max(w, 0.0))
        for j in range(K.n):
            if j != i:
                young[j] = YoungFunction.flat_then_inf(K.young[j].zero_end())
        return OrliczBall(young)
    mul = 1.0 / (1.0 - c)
    young[i] = _post_affine(_shift_clip(f_i, x_a, x_b - x_a), c, mul)
    for j in range(K.n):
        if j != i:
            young[j] = _post_affine(K.young[j], 0.0, mul)
    return OrliczBall(young)


def restrict_hyperplane(K: OrliczBall, i: int, j: int, lam: float, c: float):
    """Ball K' in n-1 coordinates isometric to K+ cut by {x_i = lam*x_j + c}.

    The surviving coordinates are x_j (renamed t) followed by the remaining
    axes in order; axis i is eliminated.  Returns EMPTY when the hyperplane
    misses the quadrant.
    """
    if i == j:
        raise ValueError("axes must differ")
    lam = float(lam)
    c = float(c)
    if lam < 0:
        raise ValueError("only positively inclined hyperplanes (lam >= 0)")
    if c < 0:
        if lam == 0:
            return EMPTY
        # rewrite x_j = (1/lam) x_i - c/lam with a nonnegative offset
        return restrict_hyperplane(K, j, i, 1.0 / lam, -c / lam)
    f_i, f_j = K.young[i], K.young[j]
    fc = f_i(c)
    if fc > 1.0:
        return EMPTY
    rest = [k for k in range(K.n) if k not in (i, j)]
    if fc == 1.0:
        w_t = f_j.zero_end()
        if lam > 0.0:
            w_t = min(w_t, max((f_i.inverse(1.0) - c) / lam, 0.0))
        young = [YoungFunction.flat_then_inf(w_t)]
        young += [YoungFunction.flat_then_inf(K.young[k].zero_end()) for k in rest]
        return OrliczBall(young)
    if lam == 0.0:
        g = f_j
    else:
        g = _snap_zero(_add_const(_add(_pre_affine(f_i, lam, c), f_j), -fc))
    mul = 1.0 / (1.0 - fc)
    young = [_post_affine(g, 0.0, mul)]
    young += [_post_affine(K.young[k], 0.0, mul) for k in rest]
    return OrliczBall(young)


def section_ball(K: OrliczBall, i: int, value: float):
    """Section {x_i = value} of K+ as a ball on the remaining axes (in order)."""
    f_i = K.young[i]
    fc = f_i(float(value))
    if fc > 1.0:
        return EMPTY
    rest = [k for k in range(K.n) if k != i]
    if fc == 1.0:
        return OrliczBall([YoungFunction.flat_then_inf(K.young[k].zero_end())
                           for k in rest])
    mul = 1.0 / (1.0 - fc)
    return OrliczBall([_post_affine(K.young[k], 0.0, mul) for k in rest])


def properize(K: OrliczBall, eps: float, volume_fn=None) -> OrliczBall:
    """Proper ball K' inside K with quadrant volume deficit <= eps * vol(K+).

    Two passes: flat starts are replaced by a shallow linear ramp, and +inf
    jumps below level 1 are pulled back by a steep linear cap.  Functions that
    are already proper are kept verbatim.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    from .quadrature import budget_volume  # local import to avoid a cycle

    needs_zero = [f.zero_end() > 0.0 for f in K.young]
    needs_inf = [math.isfinite(f.fin_end) for f in K.young]
    if not any(needs_zero) and not any(needs_inf):
        return K

    n = K.n
    vol = budget_volume(K).value
    sect = max(budget_volume(section_ball(K, i, 0.0)).value if n > 1 else 1.0
               for i in range(n))
    sect = max(sect, 1e-300)

    young = list(K.young)
    if any(needs_zero):
        # slope of f_i where it first exceeds 1/(2n); a jump counts as infinite
        slopes = []
        for f in K.young:
            t = f.inverse(1.0 / (2.0 * n))
            slopes.append(f.right_slope(t))
        c_min = min(slopes)
        delta = eps * vol * c_min / (2.0 * sect * n * n) if math.isfinite(c_min) else INF
        delta = min(delta, 1.0 / (4.0 * n))
        for i, f in enumerate(K.young):
            if not needs_zero[i]:
                continue
            s_i = f.inverse(delta)
            ramp = Segment(0.0, 0.0, ((delta / s_i, 1.0, 0.0),))
            tail = _segments_window(f, s_i, INF)
            young[i] = YoungFunction((ramp, *tail), f.fin_end)

    for i, f in enumerate(list(young)):
        if not needs_inf[i]:
            continue
        r = f.fin_end
        v = f(r)
        seg = f._segment_at(r)
        d_end = seg.slope(r)
        if v >= 1.0:
            ext = Segment(r, v, ((max(d_end, 1.0), 1.0, r),))
            body = _segments_window(f, 0.0, r)
            body = [s for s in body if s.x0 < r]
            young[i] = YoungFunction((*body, ext), INF)
        else:
            dprim = min(eps * vol / (2.0 * n * sect), r / 2.0)
            y1 = f(r - dprim)
            slope = (2.0 - y1) / dprim
            body = [s for s in _segments_window(f, 0.0, r - dprim) if s.x0 < r - dprim]
            cap = Segment(r - dprim, y1, ((slope, 1.0, r - dprim),))
            young[i] = YoungFunction((*body, cap), INF)
    return OrliczBall(young)
