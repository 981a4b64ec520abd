"""Vectorised numpy versions of the hot kernels.

Every function mirrors one in ``_kernels.pyx`` and must return bitwise
identical results; floating-point expressions are therefore written in
the same evaluation order in both places.
"""

from __future__ import annotations

import numpy as np

from .symbols import CODE

_T, _N = CODE["T"], CODE["N"]
_DIRS = np.array([CODE[s] for s in ("Ab", "Be", "R", "L", "F", "Ba")], dtype=np.int8)
_AB, _BE, _R, _L, _F, _BA = (CODE[s] for s in ("Ab", "Be", "R", "L", "F", "Ba"))
_AR, _TO, _BO, _ART = CODE["Ar"], CODE["To"], CODE["Bo"], CODE["ArT"]
_IN, _SA, _O = CODE["In"], CODE["Sa"], CODE["O"]
_MT, _HT, _FMT, _GC, _MA, _S, _Q = (CODE[s] for s in ("MT", "HT", "FMT", "GC", "MA", "S", "Q"))


def static_codes(lo_a, hi_a, lo_b, hi_b, eps_touch, null_radius, around_radius):
    """Touching and main static relation codes for ``n`` box pairs of shape (n, 3)."""
    lo_a, hi_a, lo_b, hi_b = (np.asarray(v, dtype=np.float64) for v in (lo_a, hi_a, lo_b, hi_b))
    n = lo_a.shape[0]
    gap = np.maximum(np.maximum(lo_a - hi_b, lo_b - hi_a), 0.0)
    touch = np.all(gap <= eps_touch, axis=1)
    tn = np.where(touch, _T, _N).astype(np.int8)
    dist = np.sqrt(gap[:, 0] * gap[:, 0] + gap[:, 1] * gap[:, 1] + gap[:, 2] * gap[:, 2])

    disjoint = (hi_a < lo_b) | (hi_b < lo_a)
    overlap = np.maximum(np.minimum(hi_a, hi_b) - np.maximum(lo_a, lo_b), 0.0)

    a_in_b = (
        (lo_b[:, 0] <= lo_a[:, 0]) & (hi_a[:, 0] <= hi_b[:, 0])
        & (lo_b[:, 2] <= lo_a[:, 2]) & (hi_a[:, 2] <= hi_b[:, 2])
        & (lo_b[:, 1] <= lo_a[:, 1]) & (lo_a[:, 1] < hi_a[:, 1]) & (hi_a[:, 1] <= hi_b[:, 1])
    )
    b_in_a = (
        (lo_a[:, 0] <= lo_b[:, 0]) & (hi_b[:, 0] <= hi_a[:, 0])
        & (lo_a[:, 2] <= lo_b[:, 2]) & (hi_b[:, 2] <= hi_a[:, 2])
        & (lo_a[:, 1] <= lo_b[:, 1]) & (lo_b[:, 1] < hi_b[:, 1]) & (hi_b[:, 1] <= hi_a[:, 1])
    )

    less = (lo_a < lo_b) & (hi_a < hi_b)
    more = (lo_a > lo_b) & (hi_a > hi_b)
    ok_y = ~(disjoint[:, 0] | disjoint[:, 2])
    ok_x = ~(disjoint[:, 1] | disjoint[:, 2])
    ok_z = ~(disjoint[:, 0] | disjoint[:, 1])
    cand = np.stack(
        [less[:, 1] & ok_y, more[:, 1] & ok_y,
         more[:, 0] & ok_x, less[:, 0] & ok_x,
         less[:, 2] & ok_z, more[:, 2] & ok_z],
        axis=1,
    )
    sh_y = overlap[:, 0] * overlap[:, 2]
    sh_x = overlap[:, 1] * overlap[:, 2]
    sh_z = overlap[:, 0] * overlap[:, 1]
    shadow = np.stack([sh_y, sh_y, sh_x, sh_x, sh_z, sh_z], axis=1)
    shadow = np.where(cand, shadow, -1.0)
    best = _DIRS[np.argmax(shadow, axis=1)]
    has_cand = cand.any(axis=1)

    # fallback: axis of largest gap (y, x, z precedence), else largest centre offset
    order = [1, 0, 2]
    g_ord = gap[:, order]
    center_a = (lo_a + hi_a) / 2.0
    center_b = (lo_b + hi_b) / 2.0
    off = np.abs(center_a - center_b)[:, order]
    use_gap = g_ord.max(axis=1) > 0.0
    k_gap = np.argmax(g_ord, axis=1)
    k_off = np.argmax(off, axis=1)
    k = np.where(use_gap, k_gap, k_off)
    rows = np.arange(n)
    axis = np.array(order)[k]
    lower_gap = hi_a[rows, axis] <= lo_b[rows, axis]
    lower_off = center_a[rows, axis] < center_b[rows, axis]
    lower = np.where(use_gap, lower_gap, lower_off)
    fb = np.where(
        axis == 1, np.where(lower, _AB, _BE),
        np.where(axis == 0, np.where(lower, _L, _R), np.where(lower, _F, _BA)),
    )
    fb = np.where(use_gap | (off.max(axis=1) > 0.0), fb, _AR)
    best = np.where(has_cand, best, fb)

    lateral = (best == _R) | (best == _L) | (best == _F) | (best == _BA)
    best = np.where(lateral & (dist <= around_radius), _AR, best)
    best = np.where(touch & (best == _AB), _TO, best)
    best = np.where(touch & (best == _BE), _BO, best)
    best = np.where(touch & (best == _AR), _ART, best)

    one_side = a_in_b != b_in_a
    best = np.where(one_side, np.where(a_in_b, _IN, _SA), best)
    best = np.where((dist > null_radius) & ~(a_in_b | b_in_a), _O, best)
    return tn, best.astype(np.int8)


def _norm(d):
    return np.sqrt(d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] + d[:, 2] * d[:, 2])


def dynamic_codes(ca0, ca1, cb0, cb1, touch0, touch1, dist1,
                  xi, stable_eps, far_threshold, move_eps, literal, mixed_q):
    """Dynamic relation codes for ``n`` pairs from centres at both window ends."""
    ca0, ca1, cb0, cb1 = (np.asarray(v, dtype=np.float64) for v in (ca0, ca1, cb0, cb1))
    touch0 = np.asarray(touch0, dtype=bool)
    touch1 = np.asarray(touch1, dtype=bool)
    dist1 = np.asarray(dist1, dtype=np.float64)
    moved_a = _norm(ca1 - ca0) > move_eps
    moved_b = _norm(cb1 - cb0) > move_eps
    touch_code = np.where(moved_a & moved_b, _MT, np.where(moved_a | moved_b, _FMT, _HT))
    change = _norm(ca1 - cb1) - _norm(ca0 - cb0)
    gc_limit = xi if literal else -xi
    free = np.where(
        change < gc_limit, _GC,
        np.where(
            change > xi, _MA,
            np.where((np.abs(change) < stable_eps) & (dist1 <= far_threshold), _S, _Q),
        ),
    )
    out = np.where(touch1, touch_code, free)
    if mixed_q:
        out = np.where(touch0 != touch1, _Q, out)
    return out.astype(np.int8)


def diff_counts(query, refs, lengths):
    """Per-column counts of cells that differ in 1, 2 or 3 sub-tables.

    ``query`` is (n, G, 10); ``refs`` is (M, L, G, 10) with valid columns
    ``[:lengths[m]]``.  Column ``j`` of a reference is read at
    ``min(j, lengths[m] - 1)``, i.e. shorter references repeat their last
    column.  Returns int32 of shape (M, n, 3).
    """
    query = np.asarray(query, dtype=np.int8)
    refs = np.asarray(refs, dtype=np.int8)
    lengths = np.asarray(lengths, dtype=np.int64)
    n = query.shape[0]
    m = refs.shape[0]
    if m == 0:
        return np.zeros((0, n, 3), dtype=np.int32)
    cols = np.minimum(np.arange(n)[None, :], lengths[:, None] - 1)
    picked = refs[np.arange(m)[:, None], cols]  # (M, n, G, 10)
    per_cell = (picked != query[None]).sum(axis=2)  # (M, n, 10)
    out = np.stack([(per_cell == c).sum(axis=2) for c in (1, 2, 3)], axis=2)
    return out.astype(np.int32)


def chain_completion(dur, pred):
    """Completion time of alternating two-agent chains, one chain per row."""
    dur = np.asarray(dur, dtype=np.float64)
    pred = np.asarray(pred, dtype=np.float64)
    rows, n = dur.shape
    start = np.zeros(rows)
    end_prev = np.full(rows, -np.inf)  # end of action k-1
    end_prev2 = np.full(rows, -np.inf)  # end of action k-2 (same agent as k)
    completion = np.full(rows, -np.inf)
    for k in range(n):
        if k > 0:
            start = np.maximum(start + pred[:, k - 1], end_prev2)
        end = start + dur[:, k]
        completion = np.maximum(completion, end)
        end_prev2, end_prev = end_prev, end
    return completion
