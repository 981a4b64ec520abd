"""Backend selection for the hot kernels plus stream-level array helpers.

The compiled extension is used when it imports; otherwise (or when the
environment variable ``ESEC_PURE_PYTHON=1`` is set) the numpy fallback
is used.  Both produce identical results.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from types import ModuleType

import numpy as np

from . import _fallback
from .symbols import CODE

try:
    if os.environ.get("ESEC_PURE_PYTHON") == "1":
        raise ImportError("pure python requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_BACKENDS: dict[str, ModuleType] = {"numpy": _fallback}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled

_active: ModuleType = _compiled if _compiled is not None else _fallback


def available_backends() -> tuple[str, ...]:
    return tuple(_BACKENDS)


def active_backend() -> str:
    return next(name for name, mod in _BACKENDS.items() if mod is _active)


def get_backend(name: str) -> ModuleType:
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} is not available; have {available_backends()}") from None


@contextmanager
def use_backend(name: str):
    """Temporarily switch the active backend (used by tests and benchmarks)."""
    global _active
    previous, _active = _active, get_backend(name)
    try:
        yield
    finally:
        _active = previous


def static_codes(lo_a, hi_a, lo_b, hi_b, eps_touch, null_radius, around_radius):
    return _active.static_codes(lo_a, hi_a, lo_b, hi_b, eps_touch, null_radius, around_radius)


def dynamic_codes(ca0, ca1, cb0, cb1, touch0, touch1, dist1,
                  xi, stable_eps, far_threshold, move_eps, literal=False, mixed_q=False):
    return _active.dynamic_codes(
        ca0, ca1, cb0, cb1, touch0, touch1, dist1,
        xi, stable_eps, far_threshold, move_eps, bool(literal), bool(mixed_q),
    )


def diff_counts(query, refs, lengths):
    return _active.diff_counts(query, refs, lengths)


def chain_completion(dur, pred):
    return _active.chain_completion(dur, pred)


# ------------------------------------------------------------ stream helpers

_U, _X, _A = CODE["U"], CODE["X"], CODE["A"]


def _flags(arr, pairs):
    i, j = pairs[:, 0], pairs[:, 1]
    present = arr.present[:, i] & arr.present[:, j]
    intact = arr.intact[:, i] & arr.intact[:, j]
    visible = arr.visible[:, i] & arr.visible[:, j]
    return present, intact, visible


def _apply_flags(codes, present, intact, visible):
    codes = np.where(visible, codes, _A)
    codes = np.where(intact, codes, _X)
    return np.where(present, codes, _U).astype(np.int8)


def pair_static(arr, pairs, static_cfg):
    """Touching and static codes for every frame and pair, shape (frames, pairs).

    Missing objects give U, destroyed ones X and invisible ones A.
    """
    pairs = np.asarray(pairs, dtype=np.intp).reshape(-1, 2)
    n_frames, n_pairs = arr.lo.shape[0], pairs.shape[0]
    lo = np.nan_to_num(arr.lo)
    hi = np.nan_to_num(arr.hi)
    shape = (n_frames * n_pairs, 3)
    tn, ssr = static_codes(
        lo[:, pairs[:, 0]].reshape(shape), hi[:, pairs[:, 0]].reshape(shape),
        lo[:, pairs[:, 1]].reshape(shape), hi[:, pairs[:, 1]].reshape(shape),
        static_cfg.eps_touch, static_cfg.null_radius, static_cfg.around_radius,
    )
    present, intact, visible = _flags(arr, pairs)
    tn = _apply_flags(tn.reshape(n_frames, n_pairs), present, intact, visible)
    ssr = _apply_flags(ssr.reshape(n_frames, n_pairs), present, intact, visible)
    return tn, ssr


def box_touch_and_distance(lo_a, hi_a, lo_b, hi_b, eps_touch):
    gap = np.maximum(np.maximum(lo_a - hi_b, lo_b - hi_a), 0.0)
    touch = np.all(gap <= eps_touch, axis=-1)
    dist = np.sqrt(gap[..., 0] * gap[..., 0] + gap[..., 1] * gap[..., 1] + gap[..., 2] * gap[..., 2])
    return touch, dist


def dsr_series(arr, pairs, static_cfg, dyn_cfg):
    """Dynamic codes for every frame and pair, shape (frames, pairs).

    Frame ``g`` compares frame ``g - window`` with ``g``; frames without a
    full window, or with an object missing at either end, give U.
    """
    pairs = np.asarray(pairs, dtype=np.intp).reshape(-1, 2)
    n_frames, n_pairs = arr.lo.shape[0], pairs.shape[0]
    w = dyn_cfg.window
    out = np.full((n_frames, n_pairs), _U, dtype=np.int8)
    if n_frames <= w or n_pairs == 0:
        return out
    lo = np.nan_to_num(arr.lo)
    hi = np.nan_to_num(arr.hi)
    center = (lo + hi) / 2.0
    i, j = pairs[:, 0], pairs[:, 1]
    touch, dist = box_touch_and_distance(lo[:, i], hi[:, i], lo[:, j], hi[:, j], static_cfg.eps_touch)

    shape = ((n_frames - w) * n_pairs, 3)
    codes = dynamic_codes(
        center[:-w, i].reshape(shape), center[w:, i].reshape(shape),
        center[:-w, j].reshape(shape), center[w:, j].reshape(shape),
        touch[:-w].ravel(), touch[w:].ravel(), dist[w:].ravel(),
        dyn_cfg.xi, dyn_cfg.stable_eps, dyn_cfg.far_threshold, dyn_cfg.move_eps,
        dyn_cfg.paper_literal_gc, dyn_cfg.mixed_touch == "q",
    ).reshape(n_frames - w, n_pairs)
    present, intact, visible = _flags(arr, pairs)
    codes = _apply_flags(codes, present[w:] & present[:-w], intact[w:], visible[w:])
    out[w:] = codes
    return out
