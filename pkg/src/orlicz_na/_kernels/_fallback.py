"""Pure-numpy kernels, selected when the compiled extension is unavailable.

Semantics mirror the Cython core: power terms use exp/log except for the
exact p = 1 and p = 2 paths, +inf propagates through sums, and the value at
the finite end of a function is its left limit.  Within one backend every
result is a deterministic function of the inputs.
"""

from __future__ import annotations

import numpy as np

BACKEND = "fallback"


def eval_axis(code, i, xs):
    """f_i evaluated on an array of nonnegative abscissas."""
    xs = np.asarray(xs, dtype=np.float64)
    out = np.zeros_like(xs)
    s0, s1 = int(code.func_ptr[i]), int(code.func_ptr[i + 1])
    starts = code.seg_x0[s0:s1]
    idx = np.searchsorted(starts, xs, side="right") - 1
    np.clip(idx, 0, s1 - s0 - 1, out=idx)
    for k in range(s1 - s0):
        mask = idx == k
        if not mask.any():
            continue
        s = s0 + k
        x = xs[mask]
        val = np.full(x.shape, code.seg_c0[s])
        for m in range(int(code.term_ptr[s]), int(code.term_ptr[s + 1])):
            dx = x - code.term_a[m]
            p = code.term_p[m]
            c = code.term_s[m]
            if p == 1.0:
                val += c * dx
            elif p == 2.0:
                val += c * dx * dx
            else:
                pos = dx > 0.0
                contrib = np.zeros_like(dx)
                contrib[pos] = c * np.exp(p * np.log(dx[pos]))
                val += contrib
        out[mask] = val
    out[xs > code.fin_end[i]] = np.inf
    return out


def _seg_ends(code, i):
    """Right-end abscissa and value of every segment of f_i."""
    s0, s1 = int(code.func_ptr[i]), int(code.func_ptr[i + 1])
    xs_end = np.empty(s1 - s0)
    xs_end[:-1] = code.seg_x0[s0 + 1 : s1]
    xs_end[-1] = code.fin_end[i]
    ends = np.empty(s1 - s0)
    for k in range(s1 - s0):
        s = s0 + k
        xe = xs_end[k]
        if np.isfinite(xe):
            val = code.seg_c0[s]
            for m in range(int(code.term_ptr[s]), int(code.term_ptr[s + 1])):
                dx = xe - code.term_a[m]
                p = code.term_p[m]
                if p == 1.0:
                    val += code.term_s[m] * dx
                elif p == 2.0:
                    val += code.term_s[m] * dx * dx
                elif dx > 0.0:
                    val += code.term_s[m] * np.exp(p * np.log(dx))
            ends[k] = val
        else:
            ends[k] = code.seg_c0[s] if code.term_ptr[s] == code.term_ptr[s + 1] else np.inf
    return xs_end, ends


def finv_axis(code, i, budgets):
    """sup{x : f_i(x) <= b} per budget; -1 where b < 0."""
    b = np.asarray(budgets, dtype=np.float64)
    s0, s1 = int(code.func_ptr[i]), int(code.func_ptr[i + 1])
    xs_end, ends = _seg_ends(code, i)
    out = np.full(b.shape, code.fin_end[i])
    kidx = np.searchsorted(ends, b, side="right")
    for k in range(s1 - s0):
        mask = kidx == k
        if not mask.any():
            continue
        s = s0 + k
        bb = b[mask]
        nt = int(code.term_ptr[s + 1]) - int(code.term_ptr[s])
        if nt == 0:
            x = np.full(bb.shape, code.seg_x0[s])
        elif nt == 1:
            m = int(code.term_ptr[s])
            cc, p, a = code.term_s[m], code.term_p[m], code.term_a[m]
            dx = np.maximum((bb - code.seg_c0[s]) / cc, 0.0)
            if p == 1.0:
                x = a + dx
            elif p == 2.0:
                x = a + np.sqrt(dx)
            else:
                x = np.full(bb.shape, a)
                pos = dx > 0
                x[pos] = a + np.exp(np.log(dx[pos]) / p)
            hi = xs_end[k]
            if np.isfinite(hi):
                np.minimum(x, hi, out=x)
            np.maximum(x, code.seg_x0[s], out=x)
        else:
            lo = np.full(bb.shape, code.seg_x0[s])
            hi = xs_end[k]
            if not np.isfinite(hi):
                hi = max(code.seg_x0[s] * 2.0, code.seg_x0[s] + 1.0)
                while np.any(eval_axis(code, i, np.array([hi])) <= bb.max()):
                    hi = hi * 2.0 + 1.0
            hiv = np.full(bb.shape, hi)
            for _ in range(80):
                midv = 0.5 * (lo + hiv)
                below = _seg_value(code, s, midv) <= bb
                lo = np.where(below, midv, lo)
                hiv = np.where(below, hiv, midv)
            x = lo
        out[mask] = x
    out[b < 0] = -1.0
    return out


def _seg_value(code, s, x):
    val = np.full(x.shape, code.seg_c0[s])
    for m in range(int(code.term_ptr[s]), int(code.term_ptr[s + 1])):
        dx = x - code.term_a[m]
        p = code.term_p[m]
        c = code.term_s[m]
        if p == 1.0:
            val += c * dx
        elif p == 2.0:
            val += c * dx * dx
        else:
            pos = dx > 0.0
            contrib = np.zeros_like(dx)
            contrib[pos] = c * np.exp(p * np.log(dx[pos]))
            val += contrib
    return val


def _padded(code):
    """Per-function arrays padded to common segment/term counts, cached on the
    code object.  Lets small batches evaluate all axes in a handful of numpy
    ops instead of a per-function Python loop."""
    cached = getattr(code, "_padded_cache", None)
    if cached is not None:
        return cached
    n = code.n
    seg_counts = np.diff(code.func_ptr)
    S = int(seg_counts.max())
    T = max(int((code.term_ptr[s + 1] - code.term_ptr[s]))
            for s in range(len(code.seg_x0))) if len(code.seg_x0) else 1
    T = max(T, 1)
    seg_x0 = np.full((n, S), np.inf)
    seg_c0 = np.zeros((n, S))
    t_s = np.zeros((n, S, T))
    t_p = np.ones((n, S, T))     # p = 1 with s = 0 contributes exactly 0
    t_a = np.zeros((n, S, T))
    for i in range(n):
        s0, s1 = int(code.func_ptr[i]), int(code.func_ptr[i + 1])
        for k in range(s1 - s0):
            s = s0 + k
            seg_x0[i, k] = code.seg_x0[s]
            seg_c0[i, k] = code.seg_c0[s]
            m0, m1 = int(code.term_ptr[s]), int(code.term_ptr[s + 1])
            t_s[i, k, : m1 - m0] = code.term_s[m0:m1]
            t_p[i, k, : m1 - m0] = code.term_p[m0:m1]
            t_a[i, k, : m1 - m0] = code.term_a[m0:m1]
    cached = (seg_x0, seg_c0, t_s, t_p, t_a, np.asarray(code.fin_end))
    code._padded_cache = cached
    return cached


def _residual_padded(code, pts):
    seg_x0, seg_c0, t_s, t_p, t_a, fin = _padded(code)
    xs = np.abs(pts)                                   # (C, n)
    idx = np.sum(seg_x0[None, :, :] <= xs[:, :, None], axis=2) - 1
    np.clip(idx, 0, None, out=idx)
    rows = np.arange(code.n)[None, :]
    vals = seg_c0[rows, idx]
    for t in range(t_s.shape[2]):
        s = t_s[rows, idx, t]
        p = t_p[rows, idx, t]
        a = t_a[rows, idx, t]
        dx = xs - a
        contrib = np.where(p == 1.0, s * dx, 0.0)
        m2 = p == 2.0
        if m2.any():
            contrib = np.where(m2, s * dx * dx, contrib)
        mg = (p != 1.0) & (p != 2.0) & (dx > 0.0) & (s != 0.0)
        if mg.any():
            general = np.zeros_like(dx)
            general[mg] = s[mg] * np.exp(p[mg] * np.log(dx[mg]))
            contrib = np.where(mg, general, contrib)
        vals += contrib
    vals[xs > fin[None, :]] = np.inf
    return vals.sum(axis=1)


def residual(code, pts):
    """sum_i f_i(|x_i|) per row."""
    pts = np.asarray(pts, dtype=np.float64)
    if pts.shape[0] <= 1024:
        # small batches are overhead-bound: use the padded all-axes path
        return _residual_padded(code, pts)
    acc = np.zeros(pts.shape[0])
    for i in range(code.n):
        acc += eval_axis(code, i, np.abs(pts[:, i]))
    return acc


def hnr_chains(code, start, dirs, us, box_hi, iters=60):
    """Advance hit-and-run chains on the ball quadrant.

    start: (C, n) interior points; dirs: (S, C, n) proposal directions;
    us: (S, C) uniforms selecting the point on the chord.  Returns the
    (S, C, n) trajectory of post-step positions.
    """
    x = np.array(start, dtype=np.float64)
    C, n = x.shape
    S = dirs.shape[0]
    out = np.empty((S, C, n))
    for s in range(S):
        d = dirs[s]
        with np.errstate(divide="ignore", invalid="ignore"):
            t_low = np.where(d != 0.0, (0.0 - x) / d, np.nan)
            t_high = np.where(d != 0.0, (box_hi[None, :] - x) / d, np.nan)
            lo_c = np.where(d > 0.0, t_low, np.where(d < 0.0, t_high, -np.inf))
            hi_c = np.where(d > 0.0, t_high, np.where(d < 0.0, t_low, np.inf))
        tlo = np.max(lo_c, axis=1)
        thi = np.min(hi_c, axis=1)
        # bisect both chord ends at once: residual <= 1 on [0, thi] and [tlo, 0]
        lo_u = np.zeros(C)
        hi_u = thi.copy()
        lo_d = tlo.copy()
        hi_d = np.zeros(C)
        for _ in range(iters):
            mid_u = 0.5 * (lo_u + hi_u)
            mid_d = 0.5 * (lo_d + hi_d)
            cand = np.concatenate([x + mid_u[:, None] * d, x + mid_d[:, None] * d])
            res = residual(code, cand)
            ins_u = res[:C] <= 1.0
            ins_d = res[C:] <= 1.0
            lo_u = np.where(ins_u, mid_u, lo_u)
            hi_u = np.where(ins_u, hi_u, mid_u)
            hi_d = np.where(ins_d, mid_d, hi_d)
            lo_d = np.where(ins_d, lo_d, mid_d)
        tplus = lo_u
        tminus = hi_d
        t = tminus + us[s] * (tplus - tminus)
        x = x + t[:, None] * d
        out[s] = x
    return out
