# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: piecewise Young evaluation, ball residuals, inverse
lookups and the hit-and-run chain advance.  Semantics match _fallback.py."""

from libc.math cimport exp, log, sqrt, fabs, INFINITY, isfinite

import numpy as np

BACKEND = "compiled"


cdef inline double _powx(double dx, double p) nogil:
    if dx <= 0.0:
        return 0.0
    if p == 1.0:
        return dx
    if p == 2.0:
        return dx * dx
    return exp(p * log(dx))


cdef double _eval_one(const long[::1] func_ptr, const double[::1] seg_x0,
                      const double[::1] seg_c0, const long[::1] term_ptr,
                      const double[::1] term_s, const double[::1] term_p,
                      const double[::1] term_a, const double[::1] fin_end,
                      Py_ssize_t i, double x) nogil:
    cdef Py_ssize_t s0 = func_ptr[i]
    cdef Py_ssize_t s1 = func_ptr[i + 1]
    cdef Py_ssize_t s, m
    cdef double acc
    if x > fin_end[i]:
        return INFINITY
    s = s0
    while s + 1 < s1 and seg_x0[s + 1] <= x:
        s += 1
    acc = seg_c0[s]
    for m in range(term_ptr[s], term_ptr[s + 1]):
        acc += term_s[m] * _powx(x - term_a[m], term_p[m])
    return acc


cdef class _Code:
    cdef const long[::1] func_ptr, term_ptr
    cdef const double[::1] seg_x0, seg_c0, term_s, term_p, term_a, fin_end
    cdef Py_ssize_t n


cdef _Code _wrap(code):
    cdef _Code c = _Code()
    c.func_ptr = np.ascontiguousarray(code.func_ptr, dtype=np.int64)
    c.term_ptr = np.ascontiguousarray(code.term_ptr, dtype=np.int64)
    c.seg_x0 = np.ascontiguousarray(code.seg_x0, dtype=np.float64)
    c.seg_c0 = np.ascontiguousarray(code.seg_c0, dtype=np.float64)
    c.term_s = np.ascontiguousarray(code.term_s, dtype=np.float64)
    c.term_p = np.ascontiguousarray(code.term_p, dtype=np.float64)
    c.term_a = np.ascontiguousarray(code.term_a, dtype=np.float64)
    c.fin_end = np.ascontiguousarray(code.fin_end, dtype=np.float64)
    c.n = c.func_ptr.shape[0] - 1
    return c


def eval_axis(code, Py_ssize_t i, xs):
    cdef _Code c = _wrap(code)
    cdef double[::1] x = np.ascontiguousarray(xs, dtype=np.float64).ravel()
    out_arr = np.empty(x.shape[0])
    cdef double[::1] out = out_arr
    cdef Py_ssize_t k
    with nogil:
        for k in range(x.shape[0]):
            out[k] = _eval_one(c.func_ptr, c.seg_x0, c.seg_c0, c.term_ptr,
                               c.term_s, c.term_p, c.term_a, c.fin_end, i, x[k])
    return out_arr.reshape(np.shape(xs))


cdef double _finv_one(_Code c, Py_ssize_t i, double b) nogil:
    cdef Py_ssize_t s0 = c.func_ptr[i]
    cdef Py_ssize_t s1 = c.func_ptr[i + 1]
    cdef Py_ssize_t s, m, nt, it
    cdef double xe, yend, dx, x, lo, hi, mid, val
    if b < 0.0:
        return -1.0
    for s in range(s0, s1):
        xe = c.seg_x0[s + 1] if s + 1 < s1 else c.fin_end[i]
        if isfinite(xe):
            yend = c.seg_c0[s]
            for m in range(c.term_ptr[s], c.term_ptr[s + 1]):
                yend += c.term_s[m] * _powx(xe - c.term_a[m], c.term_p[m])
        else:
            yend = c.seg_c0[s] if c.term_ptr[s] == c.term_ptr[s + 1] else INFINITY
        if yend <= b:
            continue
        nt = c.term_ptr[s + 1] - c.term_ptr[s]
        if nt == 0:
            return c.seg_x0[s]
        if nt == 1:
            m = c.term_ptr[s]
            dx = (b - c.seg_c0[s]) / c.term_s[m]
            if dx < 0.0:
                dx = 0.0
            if c.term_p[m] == 1.0:
                x = c.term_a[m] + dx
            elif c.term_p[m] == 2.0:
                x = c.term_a[m] + sqrt(dx)
            else:
                x = c.term_a[m] + (exp(log(dx) / c.term_p[m]) if dx > 0.0 else 0.0)
            if isfinite(xe) and x > xe:
                x = xe
            if x < c.seg_x0[s]:
                x = c.seg_x0[s]
            return x
        lo = c.seg_x0[s]
        hi = xe
        if not isfinite(hi):
            hi = lo * 2.0 if lo > 0.0 else 1.0
            while True:
                val = c.seg_c0[s]
                for m in range(c.term_ptr[s], c.term_ptr[s + 1]):
                    val += c.term_s[m] * _powx(hi - c.term_a[m], c.term_p[m])
                if val > b:
                    break
                hi = hi * 2.0 + 1.0
        for it in range(80):
            mid = 0.5 * (lo + hi)
            val = c.seg_c0[s]
            for m in range(c.term_ptr[s], c.term_ptr[s + 1]):
                val += c.term_s[m] * _powx(mid - c.term_a[m], c.term_p[m])
            if val <= b:
                lo = mid
            else:
                hi = mid
        return lo
    return c.fin_end[i]


def finv_axis(code, Py_ssize_t i, budgets):
    cdef _Code c = _wrap(code)
    cdef double[::1] b = np.ascontiguousarray(budgets, dtype=np.float64).ravel()
    out_arr = np.empty(b.shape[0])
    cdef double[::1] out = out_arr
    cdef Py_ssize_t k
    with nogil:
        for k in range(b.shape[0]):
            out[k] = _finv_one(c, i, b[k])
    return out_arr.reshape(np.shape(budgets))


cdef double _residual_pt(_Code c, const double[:, ::1] pts, Py_ssize_t row) nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t i
    for i in range(c.n):
        acc += _eval_one(c.func_ptr, c.seg_x0, c.seg_c0, c.term_ptr,
                         c.term_s, c.term_p, c.term_a, c.fin_end,
                         i, fabs(pts[row, i]))
    return acc


def residual(code, pts):
    cdef _Code c = _wrap(code)
    cdef const double[:, ::1] p = np.ascontiguousarray(pts, dtype=np.float64)
    out_arr = np.empty(p.shape[0])
    cdef double[::1] out = out_arr
    cdef Py_ssize_t k
    with nogil:
        for k in range(p.shape[0]):
            out[k] = _residual_pt(c, p, k)
    return out_arr


cdef double _residual_vec(_Code c, const double[::1] x, const double[::1] d,
                          double t, Py_ssize_t n) nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        acc += _eval_one(c.func_ptr, c.seg_x0, c.seg_c0, c.term_ptr,
                         c.term_s, c.term_p, c.term_a, c.fin_end,
                         i, fabs(x[i] + t * d[i]))
    return acc


def hnr_chains(code, start, dirs, us, box_hi, Py_ssize_t iters=60):
    cdef _Code c = _wrap(code)
    x_arr = np.array(start, dtype=np.float64)
    cdef double[:, ::1] x = x_arr
    cdef const double[:, :, ::1] dr = np.ascontiguousarray(dirs, dtype=np.float64)
    cdef const double[:, ::1] u = np.ascontiguousarray(us, dtype=np.float64)
    cdef const double[::1] bh = np.ascontiguousarray(box_hi, dtype=np.float64)
    cdef Py_ssize_t S = dr.shape[0]
    cdef Py_ssize_t C = x.shape[0]
    cdef Py_ssize_t n = x.shape[1]
    out_arr = np.empty((S, C, n))
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t s, ch, i, it
    cdef double tlo, thi, tl, th, lo, hi, mid, t
    with nogil:
        for s in range(S):
            for ch in range(C):
                tlo = -INFINITY
                thi = INFINITY
                for i in range(n):
                    if dr[s, ch, i] > 0.0:
                        tl = (0.0 - x[ch, i]) / dr[s, ch, i]
                        th = (bh[i] - x[ch, i]) / dr[s, ch, i]
                    elif dr[s, ch, i] < 0.0:
                        tl = (bh[i] - x[ch, i]) / dr[s, ch, i]
                        th = (0.0 - x[ch, i]) / dr[s, ch, i]
                    else:
                        continue
                    if tl > tlo:
                        tlo = tl
                    if th < thi:
                        thi = th
                # upper end
                lo = 0.0
                hi = thi
                for it in range(iters):
                    mid = 0.5 * (lo + hi)
                    if _residual_vec(c, x[ch], dr[s, ch], mid, n) <= 1.0:
                        lo = mid
                    else:
                        hi = mid
                t = lo
                # lower end
                lo = tlo
                hi = 0.0
                for it in range(iters):
                    mid = 0.5 * (lo + hi)
                    if _residual_vec(c, x[ch], dr[s, ch], mid, n) <= 1.0:
                        hi = mid
                    else:
                        lo = mid
                t = hi + u[s, ch] * (t - hi)
                for i in range(n):
                    x[ch, i] = x[ch, i] + t * dr[s, ch, i]
                    out[s, ch, i] = x[ch, i]
    return out_arr
