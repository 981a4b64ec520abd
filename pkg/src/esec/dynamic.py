"""Dynamic spatial relations from two samples ``window`` frames apart.

The label attached to frame ``g`` compares frame ``g - window`` with frame
``g``, so a stream can be labelled as it arrives; the first ``window``
frames have no history and carry U.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scene import Aabb, ObjectState, SceneStream, box_distance
from .static import StaticConfig
from .symbols import CODE, DsrRelation, TnRelation

MIXED_MODES = ("current", "q")


@dataclass(frozen=True)
class DynamicConfig:
    window: int = 10
    xi: float = 0.10
    stable_eps: float = 0.01
    far_threshold: float = 0.10
    move_eps: float = 0.005
    paper_literal_gc: bool = False
    # T at only one end of the window: follow the current frame, or emit Q
    mixed_touch: str = "current"

    def __post_init__(self) -> None:
        if isinstance(self.window, bool) or not isinstance(self.window, int) or self.window < 1:
            raise ValueError(f"window must be an integer >= 1, got {self.window!r}")
        for name in ("xi", "stable_eps", "far_threshold", "move_eps"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive number, got {value!r}")
        if self.stable_eps >= self.xi:
            raise ValueError("stable_eps must be smaller than xi")
        if self.mixed_touch not in MIXED_MODES:
            raise ValueError(f"mixed_touch must be one of {MIXED_MODES}")


def _dist(p, q) -> float:
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(p, q)))


def dsr_boxes(
    a0: Aabb, a1: Aabb, b0: Aabb, b1: Aabb, touch0: bool, touch1: bool,
    cfg: DynamicConfig = DynamicConfig(),
) -> DsrRelation:
    """Relation between ``a`` and ``b`` over a window from state 0 to state 1."""
    if touch0 != touch1 and cfg.mixed_touch == "q":
        return DsrRelation.Q
    if touch1:
        moved_a = _dist(a0.center, a1.center) > cfg.move_eps
        moved_b = _dist(b0.center, b1.center) > cfg.move_eps
        if moved_a and moved_b:
            return DsrRelation.MT
        if moved_a or moved_b:
            return DsrRelation.FMT
        return DsrRelation.HT
    change = _dist(a1.center, b1.center) - _dist(a0.center, b0.center)
    if cfg.paper_literal_gc:
        if change < cfg.xi:
            return DsrRelation.GC
        if change > cfg.xi:
            return DsrRelation.MA
    else:
        if change < -cfg.xi:
            return DsrRelation.GC
        if change > cfg.xi:
            return DsrRelation.MA
    if abs(change) < cfg.stable_eps and box_distance(a1, b1) <= cfg.far_threshold:
        return DsrRelation.S
    return DsrRelation.Q


def dsr(
    a0: ObjectState, a1: ObjectState, b0: ObjectState, b1: ObjectState,
    tn0: TnRelation | str, tn1: TnRelation | str,
    cfg: DynamicConfig = DynamicConfig(),
) -> DsrRelation:
    """Dynamic relation from the states of both objects at both ends of the window."""
    return dsr_boxes(
        a0.aabb, a1.aabb, b0.aabb, b1.aabb,
        TnRelation(tn0) == TnRelation.T, TnRelation(tn1) == TnRelation.T, cfg,
    )


def dsr_track(
    stream: SceneStream,
    pair: tuple[str, str],
    cfg: DynamicConfig = DynamicConfig(),
    static_cfg: StaticConfig = StaticConfig(),
) -> list[DsrRelation]:
    """Per-frame dynamic relation of one object pair over a whole stream."""
    from . import kernels

    arr = stream.arrays
    if pair[0] not in arr.ids or pair[1] not in arr.ids:
        return [DsrRelation.U] * len(stream.frames)
    i, j = arr.index(pair[0]), arr.index(pair[1])
    codes = kernels.dsr_series(arr, np.array([[i, j]]), static_cfg, cfg)[:, 0]
    return [DsrRelation(_NAME[c]) for c in codes]


_NAME = {CODE[d.value]: d.value for d in DsrRelation}
