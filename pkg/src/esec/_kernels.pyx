# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; see ``_fallback.py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, INFINITY

cnp.import_array()

# symbol codes, kept in step with esec.symbols.SYMBOLS (checked by the tests)
cdef enum:
    C_T = 1
    C_N = 2
    C_AB = 5
    C_BE = 6
    C_R = 7
    C_L = 8
    C_F = 9
    C_BA = 10
    C_AR = 11
    C_TO = 12
    C_BO = 13
    C_ART = 14
    C_IN = 15
    C_SA = 16
    C_O = 18
    C_MT = 19
    C_HT = 20
    C_FMT = 21
    C_GC = 22
    C_MA = 23
    C_S = 24
    C_Q = 25

cdef signed char[6] DIRS = [C_AB, C_BE, C_R, C_L, C_F, C_BA]
cdef int[3] ORDER = [1, 0, 2]


cdef inline double _max(double a, double b) nogil:
    return a if a > b else b


cdef inline double _min(double a, double b) nogil:
    return a if a < b else b


cdef inline bint _inside(const double[:] lo_a, const double[:] hi_a,
                         const double[:] lo_b, const double[:] hi_b) nogil:
    return (lo_b[0] <= lo_a[0] and hi_a[0] <= hi_b[0]
            and lo_b[2] <= lo_a[2] and hi_a[2] <= hi_b[2]
            and lo_b[1] <= lo_a[1] and lo_a[1] < hi_a[1] and hi_a[1] <= hi_b[1])


cdef signed char _ssr_one(const double[:] lo_a, const double[:] hi_a,
                          const double[:] lo_b, const double[:] hi_b,
                          bint touch, double dist, double null_radius,
                          double around_radius) nogil:
    cdef bint a_in_b = _inside(lo_a, hi_a, lo_b, hi_b)
    cdef bint b_in_a = _inside(lo_b, hi_b, lo_a, hi_a)
    cdef double gap[3]
    cdef double overlap[3]
    cdef bint disjoint[3]
    cdef bint cand[6]
    cdef double shadow[6]
    cdef int k, i, ax
    cdef signed char best
    cdef double best_area, value, ca, cb
    cdef bint lower

    if dist > null_radius and not (a_in_b or b_in_a):
        return C_O
    if a_in_b != b_in_a:
        return C_IN if a_in_b else C_SA

    for k in range(3):
        gap[k] = _max(_max(lo_a[k] - hi_b[k], lo_b[k] - hi_a[k]), 0.0)
        overlap[k] = _max(_min(hi_a[k], hi_b[k]) - _max(lo_a[k], lo_b[k]), 0.0)
        disjoint[k] = hi_a[k] < lo_b[k] or hi_b[k] < lo_a[k]

    cand[0] = lo_a[1] < lo_b[1] and hi_a[1] < hi_b[1] and not (disjoint[0] or disjoint[2])
    cand[1] = lo_a[1] > lo_b[1] and hi_a[1] > hi_b[1] and not (disjoint[0] or disjoint[2])
    cand[2] = lo_a[0] > lo_b[0] and hi_a[0] > hi_b[0] and not (disjoint[1] or disjoint[2])
    cand[3] = lo_a[0] < lo_b[0] and hi_a[0] < hi_b[0] and not (disjoint[1] or disjoint[2])
    cand[4] = lo_a[2] < lo_b[2] and hi_a[2] < hi_b[2] and not (disjoint[0] or disjoint[1])
    cand[5] = lo_a[2] > lo_b[2] and hi_a[2] > hi_b[2] and not (disjoint[0] or disjoint[1])
    shadow[0] = overlap[0] * overlap[2]
    shadow[1] = shadow[0]
    shadow[2] = overlap[1] * overlap[2]
    shadow[3] = shadow[2]
    shadow[4] = overlap[0] * overlap[1]
    shadow[5] = shadow[4]

    best = 0
    best_area = -1.0
    for i in range(6):
        if cand[i] and shadow[i] > best_area:
            best = DIRS[i]
            best_area = shadow[i]

    if best == 0:
        ax = -1
        best_area = 0.0
        for i in range(3):
            if gap[ORDER[i]] > best_area:
                best_area = gap[ORDER[i]]
                ax = ORDER[i]
        if ax >= 0:
            lower = hi_a[ax] <= lo_b[ax]
        else:
            for i in range(3):
                ca = (lo_a[ORDER[i]] + hi_a[ORDER[i]]) / 2.0
                cb = (lo_b[ORDER[i]] + hi_b[ORDER[i]]) / 2.0
                value = fabs(ca - cb)
                if value > best_area:
                    best_area = value
                    ax = ORDER[i]
            if ax >= 0:
                lower = (lo_a[ax] + hi_a[ax]) / 2.0 < (lo_b[ax] + hi_b[ax]) / 2.0
        if ax < 0:
            best = C_AR
        elif ax == 1:
            best = C_AB if lower else C_BE
        elif ax == 0:
            best = C_L if lower else C_R
        else:
            best = C_F if lower else C_BA

    if (best == C_R or best == C_L or best == C_F or best == C_BA) and dist <= around_radius:
        best = C_AR
    if touch:
        if best == C_AB:
            best = C_TO
        elif best == C_BE:
            best = C_BO
        elif best == C_AR:
            best = C_ART
    return best


def static_codes(lo_a, hi_a, lo_b, hi_b, double eps_touch, double null_radius,
                 double around_radius):
    cdef const double[:, :] la = np.ascontiguousarray(lo_a, dtype=np.float64)
    cdef const double[:, :] ha = np.ascontiguousarray(hi_a, dtype=np.float64)
    cdef const double[:, :] lb = np.ascontiguousarray(lo_b, dtype=np.float64)
    cdef const double[:, :] hb = np.ascontiguousarray(hi_b, dtype=np.float64)
    cdef Py_ssize_t n = la.shape[0], i
    cdef int k
    tn_arr = np.empty(n, dtype=np.int8)
    ssr_arr = np.empty(n, dtype=np.int8)
    cdef signed char[:] tn = tn_arr
    cdef signed char[:] ssr = ssr_arr
    cdef double g0, g1, g2, dist
    cdef bint touch
    with nogil:
        for i in range(n):
            g0 = _max(_max(la[i, 0] - hb[i, 0], lb[i, 0] - ha[i, 0]), 0.0)
            g1 = _max(_max(la[i, 1] - hb[i, 1], lb[i, 1] - ha[i, 1]), 0.0)
            g2 = _max(_max(la[i, 2] - hb[i, 2], lb[i, 2] - ha[i, 2]), 0.0)
            touch = g0 <= eps_touch and g1 <= eps_touch and g2 <= eps_touch
            dist = sqrt(g0 * g0 + g1 * g1 + g2 * g2)
            tn[i] = C_T if touch else C_N
            ssr[i] = _ssr_one(la[i], ha[i], lb[i], hb[i], touch, dist,
                              null_radius, around_radius)
    return tn_arr, ssr_arr


cdef inline double _norm3(double x, double y, double z) nogil:
    return sqrt(x * x + y * y + z * z)


def dynamic_codes(ca0, ca1, cb0, cb1, touch0, touch1, dist1,
                  double xi, double stable_eps, double far_threshold, double move_eps,
                  bint literal, bint mixed_q):
    cdef const double[:, :] a0 = np.ascontiguousarray(ca0, dtype=np.float64)
    cdef const double[:, :] a1 = np.ascontiguousarray(ca1, dtype=np.float64)
    cdef const double[:, :] b0 = np.ascontiguousarray(cb0, dtype=np.float64)
    cdef const double[:, :] b1 = np.ascontiguousarray(cb1, dtype=np.float64)
    cdef const unsigned char[:] t0 = np.ascontiguousarray(touch0, dtype=np.uint8)
    cdef const unsigned char[:] t1 = np.ascontiguousarray(touch1, dtype=np.uint8)
    cdef const double[:] d1 = np.ascontiguousarray(dist1, dtype=np.float64)
    cdef Py_ssize_t n = a0.shape[0], i
    out_arr = np.empty(n, dtype=np.int8)
    cdef signed char[:] out = out_arr
    cdef bint moved_a, moved_b
    cdef double change, gc_limit = xi if literal else -xi
    with nogil:
        for i in range(n):
            if mixed_q and (t0[i] != 0) != (t1[i] != 0):
                out[i] = C_Q
            elif t1[i]:
                moved_a = _norm3(a1[i, 0] - a0[i, 0], a1[i, 1] - a0[i, 1], a1[i, 2] - a0[i, 2]) > move_eps
                moved_b = _norm3(b1[i, 0] - b0[i, 0], b1[i, 1] - b0[i, 1], b1[i, 2] - b0[i, 2]) > move_eps
                if moved_a and moved_b:
                    out[i] = C_MT
                elif moved_a or moved_b:
                    out[i] = C_FMT
                else:
                    out[i] = C_HT
            else:
                change = (_norm3(a1[i, 0] - b1[i, 0], a1[i, 1] - b1[i, 1], a1[i, 2] - b1[i, 2])
                          - _norm3(a0[i, 0] - b0[i, 0], a0[i, 1] - b0[i, 1], a0[i, 2] - b0[i, 2]))
                if change < gc_limit:
                    out[i] = C_GC
                elif change > xi:
                    out[i] = C_MA
                elif fabs(change) < stable_eps and d1[i] <= far_threshold:
                    out[i] = C_S
                else:
                    out[i] = C_Q
    return out_arr


def diff_counts(query, refs, lengths):
    cdef const signed char[:, :, :] q = np.ascontiguousarray(query, dtype=np.int8)
    cdef const signed char[:, :, :, :] r = np.ascontiguousarray(refs, dtype=np.int8)
    cdef const long long[:] ln = np.ascontiguousarray(lengths, dtype=np.int64)
    cdef Py_ssize_t n = q.shape[0], groups = q.shape[1], rows = q.shape[2]
    cdef Py_ssize_t m = r.shape[0], mi, j, g, row, col
    out_arr = np.zeros((m, n, 3), dtype=np.int32)
    cdef int[:, :, :] out = out_arr
    cdef int d
    with nogil:
        for mi in range(m):
            for j in range(n):
                col = j if j < ln[mi] - 1 else ln[mi] - 1
                for row in range(rows):
                    d = 0
                    for g in range(groups):
                        if r[mi, col, g, row] != q[j, g, row]:
                            d = d + 1
                    if d > 0:
                        out[mi, j, d - 1] += 1
    return out_arr


def chain_completion(dur, pred):
    cdef const double[:, :] du = np.ascontiguousarray(dur, dtype=np.float64)
    cdef const double[:, :] pr = np.ascontiguousarray(pred, dtype=np.float64)
    cdef Py_ssize_t rows = du.shape[0], n = du.shape[1], i, k
    out_arr = np.empty(rows, dtype=np.float64)
    cdef double[:] out = out_arr
    cdef double start, end, end_prev, end_prev2, completion
    with nogil:
        for i in range(rows):
            start = 0.0
            end_prev = -INFINITY
            end_prev2 = -INFINITY
            completion = -INFINITY
            for k in range(n):
                if k > 0:
                    start = _max(start + pr[i, k - 1], end_prev2)
                end = start + du[i, k]
                completion = _max(completion, end)
                end_prev2 = end_prev
                end_prev = end
            out[i] = completion
    return out_arr
