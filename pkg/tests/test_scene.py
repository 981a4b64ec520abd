import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from esec.scene import (
    Aabb,
    SceneFormatError,
    aabb_metrics,
    box_distance,
    check_uniform_timing,
    parse_scene,
    serialize_scene,
)
from helpers import box, cube, obj, stream

HEADER = json.dumps({"fps": 30.0, "label": "hide", "y_down": True})


def _obj(oid, lo=(0, 0, 0), hi=(1, 1, 1), **flags):
    rec = {"id": oid, "min": list(lo), "max": list(hi), "visible": True, "intact": True,
           "hand": False, "ground": False}
    rec.update(flags)
    return rec


def _frame(i, t, objs):
    return json.dumps({"i": i, "t": t, "objects": objs})


def _doc(*lines):
    return "\n".join([HEADER, *lines]) + "\n"


def test_minimal_frame_parses():
    text = _doc(_frame(0, 0.0, [_obj("hand", hand=True), _obj("table", ground=True), _obj("cup")]))
    s = parse_scene(text)
    assert len(s.frames) == 1
    assert len(s.frames[0].objects) == 3
    assert s.label == "hide" and s.fps == 30.0
    assert s.hand_id == "hand" and s.ground_id == "table"


@pytest.mark.parametrize(
    "lines, message",
    [
        ((_frame(0, 0.1, [_obj("a")]), _frame(1, 0.0, [_obj("a")])), "non-monotonic timestamps"),
        ((_frame(0, 0.0, [_obj("a", ground=True), _obj("b", ground=True)]),), "multiple grounds"),
        ((_frame(0, 0.0, [_obj("a"), _obj("a")]),), "duplicate object_id"),
        ((), "zero frames"),
        (("{not json",), "malformed record"),
        ((_frame(0, 0.0, [_obj("a", lo=(2, 0, 0))]),), "malformed record"),
        ((json.dumps({"i": 0, "objects": []}),), "missing 't'"),
        ((_frame(0, 0.0, [_obj("h", hand=True)]), _frame(1, 0.1, [_obj("x")])), "hand missing"),
        ((_frame(0, 0.0, [_obj("a", visible="yes")]),), "boolean"),
    ],
)
def test_parse_errors(lines, message):
    with pytest.raises(SceneFormatError, match=message):
        parse_scene(_doc(*lines))


def test_missing_header_and_empty_input():
    with pytest.raises(SceneFormatError, match="missing header"):
        parse_scene(_frame(0, 0.0, [_obj("a")]) + "\n")
    with pytest.raises(SceneFormatError, match="zero frames"):
        parse_scene(b"")
    with pytest.raises(SceneFormatError, match="fps"):
        parse_scene(json.dumps({"fps": 0}) + "\n" + _frame(0, 0.0, []))


def test_aabb_invariants():
    with pytest.raises(SceneFormatError):
        Aabb((0, 0, 0), (1, -1, 1))
    with pytest.raises(SceneFormatError):
        Aabb((0, 0, math.nan), (1, 1, 1))
    with pytest.raises(SceneFormatError):
        Aabb((0, 0), (1, 1))


def test_metrics_examples():
    unit = box((0, 0, 0), (1, 1, 1))
    m = aabb_metrics(unit, unit)
    assert m.distance == 0 and m.face_gap == (0, 0, 0)
    assert aabb_metrics(cube((0, 0, 0)), cube((3, 4, 0))).distance == 5.0
    g = aabb_metrics(box((0, 0, 0), (1, 1, 1)), box((2, 0, 0), (3, 1, 1))).face_gap
    assert g == (1.0, 0.0, 0.0)


coord = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
extent = st.floats(0, 3, allow_nan=False, allow_infinity=False)


@st.composite
def boxes(draw):
    lo = [draw(coord) for _ in range(3)]
    return Aabb(tuple(lo), tuple(x + draw(extent) for x in lo))


@given(boxes(), boxes())
def test_metrics_symmetric_and_nonnegative(a, b):
    ab, ba = aabb_metrics(a, b), aabb_metrics(b, a)
    assert ab.distance == ba.distance >= 0
    assert ab.face_gap == ba.face_gap
    assert all(g >= 0 for g in ab.face_gap)
    assert (ab.distance == 0) == (a.center == b.center)
    assert box_distance(a, b) == box_distance(b, a)


@st.composite
def streams(draw):
    n_frames = draw(st.integers(1, 5))
    ids = draw(st.lists(st.sampled_from("abcdef"), min_size=1, max_size=4, unique=True))
    frames = []
    for _ in range(n_frames):
        objs = [obj("hand", draw(boxes()), is_hand=True), obj("table", draw(boxes()), is_ground=True)]
        for oid in ids:
            objs.append(obj(oid, draw(boxes()), visible=draw(st.booleans()), intact=draw(st.booleans())))
        frames.append(objs)
    label = draw(st.one_of(st.none(), st.sampled_from(["hide", "push"])))
    return stream(frames, fps=draw(st.sampled_from([10.0, 30.0, 29.97])), label=label,
                  y_down=draw(st.booleans()))


@given(streams())
def test_round_trip(s):
    data = serialize_scene(s)
    back = parse_scene(data)
    assert back.frames == s.frames
    assert (back.fps, back.label, back.y_down) == (s.fps, s.label, s.y_down)
    assert serialize_scene(back) == data


def test_canonical_flips_world_up_streams():
    s = stream([[obj("hand", box((0, 1, 0), (1, 2, 1)), is_hand=True)]], y_down=False)
    c = s.canonical()
    assert c.y_down and c.frames[0].objects[0].aabb == box((0, -2, 0), (1, -1, 1))
    assert check_uniform_timing(s)
