"""Touching and static spatial relations between two boxes.

Scalar reference implementation.  The builder evaluates whole streams
through the array kernels in :mod:`esec.kernels`, which the test-suite
checks against the functions here.

All boxes are expected in the canonical frame: x grows to the right, y
grows downward (a smaller y is higher up) and z grows away from the camera
(a smaller z is in front).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .scene import Aabb, ObjectState, box_distance, face_gaps
from .symbols import SsrRelation, TnRelation

# Directional relations in tie-break precedence order.  Pairs of opposite
# relations sit next to each other, which keeps the argmax antisymmetric.
DIRECTIONS: tuple[SsrRelation, ...] = (
    SsrRelation.Ab, SsrRelation.Be,
    SsrRelation.R, SsrRelation.L,
    SsrRelation.F, SsrRelation.Ba,
)

_TOUCH_MAP = {
    SsrRelation.Ab: SsrRelation.To,
    SsrRelation.Be: SsrRelation.Bo,
    SsrRelation.Ar: SsrRelation.ArT,
}

# axis tested by each direction and the two axes whose disjointness excludes it
_AXES = {
    SsrRelation.Ab: (1, (0, 2)),
    SsrRelation.Be: (1, (0, 2)),
    SsrRelation.R: (0, (1, 2)),
    SsrRelation.L: (0, (1, 2)),
    SsrRelation.F: (2, (0, 1)),
    SsrRelation.Ba: (2, (0, 1)),
}


@dataclass(frozen=True)
class StaticConfig:
    eps_touch: float = 0.005
    null_radius: float = 0.10
    around_radius: float = 0.10
    point_mode: bool = False

    def __post_init__(self) -> None:
        for name in ("eps_touch", "null_radius", "around_radius"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive number, got {value!r}")


def _disjoint(a: Aabb, b: Aabb, k: int) -> bool:
    return a.max[k] < b.min[k] or b.max[k] < a.min[k]


def _overlap(a: Aabb, b: Aabb, k: int) -> float:
    return max(0.0, min(a.max[k], b.max[k]) - max(a.min[k], b.min[k]))


def _point_touch(pa, pb, eps: float) -> bool:
    from scipy.spatial import cKDTree

    dist, _ = cKDTree(pb).query(pa, k=1)
    return bool(min(dist) <= eps)


def touching(a: ObjectState, b: ObjectState, cfg: StaticConfig = StaticConfig()) -> TnRelation:
    """T/N between two objects, after the X (destroyed) and A (absent) flags."""
    if not (a.intact and b.intact):
        return TnRelation.X
    if not (a.visible and b.visible):
        return TnRelation.A
    if cfg.point_mode and a.point_set and b.point_set:
        return TnRelation.T if _point_touch(a.point_set, b.point_set, cfg.eps_touch) else TnRelation.N
    return TnRelation.T if boxes_touch(a.aabb, b.aabb, cfg.eps_touch) else TnRelation.N


def boxes_touch(a: Aabb, b: Aabb, eps_touch: float) -> bool:
    return all(g <= eps_touch for g in face_gaps(a, b))


def inside(a: Aabb, b: Aabb) -> bool:
    """True when ``a`` sits inside ``b`` (x and z nested, y nested and non-degenerate)."""
    for k in (0, 2):
        if not (b.min[k] <= a.min[k] and a.max[k] <= b.max[k]):
            return False
    return b.min[1] <= a.min[1] < a.max[1] <= b.max[1]


def _direction_holds(a: Aabb, b: Aabb, rel: SsrRelation) -> bool:
    k, excl = _AXES[rel]
    if any(_disjoint(a, b, e) for e in excl):
        return False
    # Ab, L and F: a has the smaller coordinates along the axis
    if rel in (SsrRelation.Ab, SsrRelation.L, SsrRelation.F):
        return a.min[k] < b.min[k] and a.max[k] < b.max[k]
    return a.min[k] > b.min[k] and a.max[k] > b.max[k]


def ssr_candidates(a: Aabb, b: Aabb) -> set[SsrRelation]:
    out = {rel for rel in DIRECTIONS if _direction_holds(a, b, rel)}
    if inside(a, b):
        out.add(SsrRelation.In)
    if inside(b, a):
        out.add(SsrRelation.Sa)
    return out


def shadow_area(a: Aabb, b: Aabb, r: SsrRelation | str) -> float:
    """Area of the overlap of the two facing surfaces along the axis of ``r``."""
    try:
        rel = SsrRelation(r)
        k, excl = _AXES[rel]
    except (ValueError, KeyError):
        raise ValueError(f"no facing surface for relation {r!s}") from None
    return _overlap(a, b, excl[0]) * _overlap(a, b, excl[1])


def _fallback_direction(a: Aabb, b: Aabb) -> SsrRelation:
    """Direction along the axis of largest separation (y, then x, then z on ties)."""
    gaps = face_gaps(a, b)
    order = (1, 0, 2)
    if max(gaps) > 0.0:
        k = max(order, key=lambda i: (gaps[i], -order.index(i)))
        lower = a.max[k] <= b.min[k]
    else:
        ca, cb = a.center, b.center
        offs = [abs(ca[i] - cb[i]) for i in range(3)]
        if max(offs) == 0.0:
            return SsrRelation.Ar
        k = max(order, key=lambda i: (offs[i], -order.index(i)))
        lower = ca[k] < cb[k]
    if k == 1:
        return SsrRelation.Ab if lower else SsrRelation.Be
    if k == 0:
        return SsrRelation.L if lower else SsrRelation.R
    return SsrRelation.F if lower else SsrRelation.Ba


def box_ssr(a: Aabb, b: Aabb, tn: TnRelation | str, cfg: StaticConfig = StaticConfig()) -> SsrRelation:
    """Main static relation of two boxes given their touching state."""
    is_in, is_sa = inside(a, b), inside(b, a)
    dist = box_distance(a, b)
    if dist > cfg.null_radius and not (is_in or is_sa):
        return SsrRelation.O
    if is_in != is_sa:
        return SsrRelation.In if is_in else SsrRelation.Sa

    best, best_area = None, -1.0
    for rel in DIRECTIONS:
        if _direction_holds(a, b, rel):
            area = shadow_area(a, b, rel)
            if area > best_area:
                best, best_area = rel, area
    if best is None:
        best = _fallback_direction(a, b)
    if best in (SsrRelation.R, SsrRelation.L, SsrRelation.F, SsrRelation.Ba) and dist <= cfg.around_radius:
        best = SsrRelation.Ar
    if TnRelation(tn) == TnRelation.T:
        best = _TOUCH_MAP.get(best, best)
    return best


def main_ssr(
    a: ObjectState, b: ObjectState, tn: TnRelation | str, cfg: StaticConfig = StaticConfig()
) -> SsrRelation | TnRelation:
    """Main static relation; U, X and A pass through unchanged from ``tn``."""
    tn = TnRelation(tn)
    if tn in (TnRelation.X, TnRelation.A, TnRelation.U):
        return tn
    return box_ssr(a.aabb, b.aabb, tn, cfg)


def between(a: Aabb, k: Aabb, b: Aabb) -> bool:
    """True when ``k`` lies in the space between ``a`` and ``b``."""
    return (
        k.min[0] >= min(a.max[0], b.max[0])
        and k.max[0] <= max(a.min[0], b.min[0])
        and k.min[1] >= max(a.min[1], b.min[1])
        and k.max[1] <= min(a.max[1], b.max[1])
        and k.min[2] >= max(a.min[2], b.min[2])
        and k.max[2] <= min(a.max[2], b.max[2])
    )
