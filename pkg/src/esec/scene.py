"""Scene data model: boxes, object states, frames and streams.

Streams are stored exactly as read.  Relation code works in the image-style
frame (smaller y is higher up); :meth:`SceneStream.canonical` flips streams
recorded with an upward y axis into that frame.

File format (one JSON document per line)::

    {"fps": 30.0, "label": "hide", "y_down": true}
    {"i": 0, "t": 0.0, "objects": [{"id": "hand", "min": [..], "max": [..],
                                    "visible": true, "intact": true,
                                    "hand": true, "ground": false}, ...]}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

Vec3 = tuple[float, float, float]


class SceneFormatError(ValueError):
    """Raised for scene files or streams that violate the data model."""


def _vec3(v: Iterable[float], what: str) -> Vec3:
    try:
        out = tuple(float(x) for x in v)
    except (TypeError, ValueError) as exc:
        raise SceneFormatError(f"{what} must be three numbers") from exc
    if len(out) != 3:
        raise SceneFormatError(f"{what} must be three numbers, got {len(out)}")
    if not all(math.isfinite(x) for x in out):
        raise SceneFormatError(f"{what} has non-finite coordinates")
    return out  # type: ignore[return-value]


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned bounding box in meters."""

    min: Vec3
    max: Vec3

    def __post_init__(self) -> None:
        lo = _vec3(self.min, "box min")
        hi = _vec3(self.max, "box max")
        if any(a > b for a, b in zip(lo, hi)):
            raise SceneFormatError(f"box min {lo} exceeds max {hi}")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)

    @classmethod
    def from_center(cls, center: Sequence[float], half: Sequence[float]) -> "Aabb":
        return cls(
            tuple(c - h for c, h in zip(center, half)),  # type: ignore[arg-type]
            tuple(c + h for c, h in zip(center, half)),  # type: ignore[arg-type]
        )

    @property
    def center(self) -> Vec3:
        return tuple((a + b) / 2.0 for a, b in zip(self.min, self.max))  # type: ignore[return-value]

    @property
    def size(self) -> Vec3:
        return tuple(b - a for a, b in zip(self.min, self.max))  # type: ignore[return-value]

    def flip_y(self) -> "Aabb":
        return Aabb(
            (self.min[0], -self.max[1], self.min[2]),
            (self.max[0], -self.min[1], self.max[2]),
        )

    def contains(self, other: "Aabb") -> bool:
        return all(
            self.min[k] <= other.min[k] and other.max[k] <= self.max[k] for k in range(3)
        )


@dataclass(frozen=True)
class ObjectState:
    object_id: str
    aabb: Aabb
    visible: bool = True
    intact: bool = True
    is_hand: bool = False
    is_ground: bool = False
    point_set: tuple[Vec3, ...] | None = None


@dataclass(frozen=True)
class FrameRecord:
    index: int
    t: float
    objects: tuple[ObjectState, ...]

    def get(self, object_id: str) -> ObjectState | None:
        for obj in self.objects:
            if obj.object_id == object_id:
                return obj
        return None

    @property
    def hand(self) -> ObjectState | None:
        return next((o for o in self.objects if o.is_hand), None)


@dataclass(frozen=True)
class SceneArrays:
    """Column-oriented view of a stream in the canonical (y-down) frame.

    ``lo``/``hi`` have shape ``(frames, objects, 3)``; rows of objects that
    are missing from a frame hold NaN and ``present`` is False there.
    """

    ids: tuple[str, ...]
    t: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    present: np.ndarray
    visible: np.ndarray
    intact: np.ndarray
    hand: int | None
    ground: int | None

    def index(self, object_id: str) -> int:
        return self.ids.index(object_id)

    def center(self, k: int) -> np.ndarray:
        return (self.lo[:, k] + self.hi[:, k]) / 2.0


@dataclass(frozen=True)
class SceneStream:
    frames: tuple[FrameRecord, ...]
    fps: float
    label: str | None = None
    y_down: bool = True
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def object_ids(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for fr in self.frames:
            for obj in fr.objects:
                seen.setdefault(obj.object_id, None)
        return tuple(seen)

    @property
    def hand_id(self) -> str | None:
        for fr in self.frames:
            if fr.hand is not None:
                return fr.hand.object_id
        return None

    @property
    def ground_id(self) -> str | None:
        for fr in self.frames:
            for obj in fr.objects:
                if obj.is_ground:
                    return obj.object_id
        return None

    def canonical(self) -> "SceneStream":
        """Same stream with y pointing down (image-style), as the relation rules expect."""
        if self.y_down:
            return self
        frames = tuple(
            FrameRecord(
                fr.index,
                fr.t,
                tuple(
                    ObjectState(
                        o.object_id, o.aabb.flip_y(), o.visible, o.intact, o.is_hand,
                        o.is_ground,
                        None if o.point_set is None
                        else tuple((p[0], -p[1], p[2]) for p in o.point_set),
                    )
                    for o in fr.objects
                ),
            )
            for fr in self.frames
        )
        return SceneStream(frames, self.fps, self.label, True)

    @cached_property
    def arrays(self) -> SceneArrays:
        """Canonical-frame arrays; computed once per stream."""
        ids = self.object_ids
        pos = {oid: k for k, oid in enumerate(ids)}
        n, m = len(self.frames), len(ids)
        lo = np.full((n, m, 3), np.nan)
        hi = np.full((n, m, 3), np.nan)
        present = np.zeros((n, m), dtype=bool)
        visible = np.zeros((n, m), dtype=bool)
        intact = np.ones((n, m), dtype=bool)
        sign = 1.0 if self.y_down else -1.0
        for f, fr in enumerate(self.frames):
            for obj in fr.objects:
                k = pos[obj.object_id]
                a, b = obj.aabb.min, obj.aabb.max
                if sign > 0:
                    lo[f, k] = a
                    hi[f, k] = b
                else:
                    lo[f, k] = (a[0], -b[1], a[2])
                    hi[f, k] = (b[0], -a[1], b[2])
                present[f, k] = True
                visible[f, k] = obj.visible
                intact[f, k] = obj.intact
        hand, ground = self.hand_id, self.ground_id
        return SceneArrays(
            ids=ids,
            t=np.array([fr.t for fr in self.frames], dtype=float),
            lo=lo,
            hi=hi,
            present=present,
            visible=visible,
            intact=intact,
            hand=None if hand is None else pos[hand],
            ground=None if ground is None else pos[ground],
        )


@dataclass(frozen=True)
class AabbMetrics:
    center_a: Vec3
    center_b: Vec3
    distance: float
    face_gap: Vec3


def face_gaps(a: Aabb, b: Aabb) -> Vec3:
    """Per-axis separation of two boxes; zero on axes where they overlap or touch."""
    return tuple(  # type: ignore[return-value]
        max(0.0, a.min[k] - b.max[k], b.min[k] - a.max[k]) for k in range(3)
    )


def box_distance(a: Aabb, b: Aabb) -> float:
    """Euclidean distance between the closest points of two boxes."""
    gx, gy, gz = face_gaps(a, b)
    return math.sqrt(gx * gx + gy * gy + gz * gz)


def aabb_metrics(a: Aabb, b: Aabb) -> AabbMetrics:
    ca, cb = a.center, b.center
    dist = math.sqrt(sum((p - q) ** 2 for p, q in zip(ca, cb)))
    return AabbMetrics(ca, cb, dist, face_gaps(a, b))


# --------------------------------------------------------------------- file io

def _expect(rec: dict, key: str, kind, line_no: int, default=None, required=True):
    if key not in rec:
        if required:
            raise SceneFormatError(f"malformed record at line {line_no}: missing {key!r}")
        return default
    value = rec[key]
    if kind is bool:
        if not isinstance(value, bool):
            raise SceneFormatError(f"malformed record at line {line_no}: {key!r} must be a boolean")
    elif kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise SceneFormatError(f"malformed record at line {line_no}: {key!r} must be an integer")
    elif kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise SceneFormatError(f"malformed record at line {line_no}: {key!r} must be a finite number")
        value = float(value)
    return value


def _parse_object(rec, line_no: int) -> ObjectState:
    if not isinstance(rec, dict):
        raise SceneFormatError(f"malformed record at line {line_no}: object entry is not a mapping")
    oid = rec.get("id")
    if not isinstance(oid, str) or not oid:
        raise SceneFormatError(f"malformed record at line {line_no}: object id must be a non-empty string")
    try:
        box = Aabb(rec.get("min"), rec.get("max"))
    except SceneFormatError as exc:
        raise SceneFormatError(f"malformed record at line {line_no}: {exc}") from None
    points = rec.get("points")
    if points is not None:
        try:
            points = tuple(_vec3(p, "point") for p in points)
        except (SceneFormatError, TypeError) as exc:
            raise SceneFormatError(f"malformed record at line {line_no}: {exc}") from None
    return ObjectState(
        object_id=oid,
        aabb=box,
        visible=_expect(rec, "visible", bool, line_no, True, required=False),
        intact=_expect(rec, "intact", bool, line_no, True, required=False),
        is_hand=_expect(rec, "hand", bool, line_no, False, required=False),
        is_ground=_expect(rec, "ground", bool, line_no, False, required=False),
        point_set=points,
    )


def validate_frames(frames: Sequence[FrameRecord]) -> None:
    """Check ordering and flag consistency; raises SceneFormatError."""
    if not frames:
        raise SceneFormatError("zero frames")
    ground_id: str | None = None
    hand_seen = False
    prev: FrameRecord | None = None
    for fr in frames:
        if fr.index < 0:
            raise SceneFormatError(f"negative frame index {fr.index}")
        if prev is not None:
            if not fr.t > prev.t:
                raise SceneFormatError(
                    f"non-monotonic timestamps: frame {fr.index} t={fr.t} after t={prev.t}"
                )
            if not fr.index > prev.index:
                raise SceneFormatError(f"non-monotonic frame index {fr.index} after {prev.index}")
        ids = [o.object_id for o in fr.objects]
        if len(set(ids)) != len(ids):
            dup = next(i for i in ids if ids.count(i) > 1)
            raise SceneFormatError(f"duplicate object_id {dup!r} in frame {fr.index}")
        grounds = [o.object_id for o in fr.objects if o.is_ground]
        if len(grounds) > 1:
            raise SceneFormatError(f"multiple grounds in frame {fr.index}")
        if grounds:
            if ground_id is None:
                ground_id = grounds[0]
            elif grounds[0] != ground_id:
                raise SceneFormatError(f"ground changed to {grounds[0]!r} in frame {fr.index}")
        hands = [o for o in fr.objects if o.is_hand]
        if len(hands) > 1:
            raise SceneFormatError(f"multiple hands in frame {fr.index}")
        if hands:
            hand_seen = True
        elif hand_seen:
            raise SceneFormatError(f"hand missing in frame {fr.index}")
        prev = fr


def parse_scene(data: bytes | str) -> SceneStream:
    """Parse the line-delimited scene format into a validated stream."""
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    lines = [(n, ln) for n, ln in enumerate(text.splitlines(), start=1) if ln.strip()]
    if not lines:
        raise SceneFormatError("zero frames")
    records = []
    for line_no, ln in lines:
        try:
            rec = json.loads(ln)
        except json.JSONDecodeError as exc:
            raise SceneFormatError(f"malformed record at line {line_no}: {exc.msg}") from None
        if not isinstance(rec, dict):
            raise SceneFormatError(f"malformed record at line {line_no}: not a JSON object")
        records.append((line_no, rec))

    header_line, header = records[0]
    if "fps" not in header or "objects" in header:
        raise SceneFormatError(f"malformed record at line {header_line}: missing header")
    fps = _expect(header, "fps", float, header_line)
    if fps <= 0:
        raise SceneFormatError(f"malformed record at line {header_line}: fps must be positive")
    label = header.get("label")
    if label is not None and not isinstance(label, str):
        raise SceneFormatError(f"malformed record at line {header_line}: label must be a string or null")
    y_down = _expect(header, "y_down", bool, header_line, True, required=False)

    frames = []
    for line_no, rec in records[1:]:
        index = _expect(rec, "i", int, line_no)
        t = _expect(rec, "t", float, line_no)
        objs = rec.get("objects")
        if not isinstance(objs, list):
            raise SceneFormatError(f"malformed record at line {line_no}: 'objects' must be a list")
        frames.append(FrameRecord(index, t, tuple(_parse_object(o, line_no) for o in objs)))
    validate_frames(frames)
    return SceneStream(tuple(frames), fps, label, y_down)


def _object_record(o: ObjectState) -> dict:
    rec = {
        "id": o.object_id,
        "min": list(o.aabb.min),
        "max": list(o.aabb.max),
        "visible": o.visible,
        "intact": o.intact,
        "hand": o.is_hand,
        "ground": o.is_ground,
    }
    if o.point_set is not None:
        rec["points"] = [list(p) for p in o.point_set]
    return rec


def serialize_scene(stream: SceneStream) -> bytes:
    out = [json.dumps({"fps": stream.fps, "label": stream.label, "y_down": stream.y_down})]
    for fr in stream.frames:
        out.append(
            json.dumps(
                {"i": fr.index, "t": fr.t, "objects": [_object_record(o) for o in fr.objects]},
                separators=(",", ":"),
            )
        )
    return ("\n".join(out) + "\n").encode("utf-8")


def read_scene(path: str | Path) -> SceneStream:
    return parse_scene(Path(path).read_bytes())


def write_scene(path: str | Path, stream: SceneStream) -> None:
    Path(path).write_bytes(serialize_scene(stream))


def check_uniform_timing(stream: SceneStream, tol: float = 1e-6) -> bool:
    """True when consecutive timestamps are spaced 1/fps apart (synthetic streams)."""
    dt = 1.0 / stream.fps
    ts = [fr.t for fr in stream.frames]
    return all(abs(b - a - dt) < tol for a, b in zip(ts, ts[1:]))
