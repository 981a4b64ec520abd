"""Scripted synthesis of the ten experimental manipulation actions.

Each action is a short choreography of a box-shaped hand and a few
objects on a table.  The scripts are written against the relation
thresholds of the default configs: slow creeping contacts give HT,
moving contacts FMT, single-frame snaps make lift-off and landing
change every affected relation on the same frame, and the hand's
height decides whether it sits within the null radius of the table.

Variants differ in layout direction, object sizes and distances,
distractor objects and total duration.  Extra duration is spent with
the hand idle far from the scene, so the relational script (and hence
the chain) does not depend on the sampled duration.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .chain import load_table
from .scene import Aabb, FrameRecord, ObjectState, SceneStream, serialize_scene

ACTIONS = ("hide", "cut", "chop", "take_down", "put_on_top", "shake", "lay", "push", "uncover", "stir")

# (mean, sd) in seconds for actions without human timings
_DEFAULT_DURATIONS = {
    "cut": (12.5, 2.0),
    "chop": (11.0, 2.0),
    "lay": (10.0, 1.5),
    "uncover": (10.5, 1.5),
    "stir": (13.0, 2.0),
}

HAND_HALF = 0.04
PRE_ROLL = 12  # frames with the hand invisible before the action
UP = np.array([0.0, 1.0, 0.0])
_AXES = (
    np.array([1.0, 0.0, 0.0]),
    np.array([-1.0, 0.0, 0.0]),
    np.array([0.0, 0.0, 1.0]),
    np.array([0.0, 0.0, -1.0]),
)


class GeometryError(ValueError):
    """Raised when sampled object boxes overlap at the first frame."""


def default_durations() -> dict[str, tuple[float, float]]:
    out = dict(_DEFAULT_DURATIONS)
    for t in load_table():
        out[t.name] = (t.dur_mean, t.dur_sd)
    return out


@dataclass(frozen=True)
class GenParams:
    action: str
    seed: int = 0
    fps: float = 30.0
    distractor_count: int | None = None  # None: drawn from 0..3
    size_scale: float = 1.0
    distance_scale: float = 1.0
    speed_scale: float = 1.0
    duration: tuple[float, float] | None = None  # (mean, sd); None: per-action default

    def __post_init__(self) -> None:
        if self.action not in ACTIONS:
            raise ValueError(f"unknown action {self.action!r}; expected one of {', '.join(ACTIONS)}")
        if not self.fps > 0:
            raise ValueError("fps must be positive")
        if self.distractor_count is not None and not 0 <= self.distractor_count <= 3:
            raise ValueError("distractor_count must be in 0..3")
        for name in ("size_scale", "distance_scale", "speed_scale"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive")
        if self.duration is not None:
            mean, sd = self.duration
            if not mean > 0 or sd < 0:
                raise ValueError("duration needs a positive mean and a non-negative sd")


# ----------------------------------------------------------------- recording


@dataclass
class _Body:
    center: np.ndarray
    half: np.ndarray
    visible: bool = True
    intact: bool = True
    hand: bool = False
    ground: bool = False


class _Recorder:
    """Accumulates per-frame snapshots while the script moves bodies."""

    def __init__(self) -> None:
        self.bodies: dict[str, _Body] = {}
        self.frames: list[dict[str, tuple]] = []
        self.carry: set[str] = set()

    def add(self, oid: str, center, half, **flags) -> None:
        self.bodies[oid] = _Body(np.asarray(center, float), np.asarray(half, float), **flags)

    def _snapshot(self, oid: str) -> tuple:
        b = self.bodies[oid]
        return (b.center.copy(), b.half.copy(), b.visible, b.intact)

    def emit(self) -> None:
        self.frames.append({k: self._snapshot(k) for k in self.bodies})

    def flag(self, oid: str, **flags) -> None:
        """Change flags from the most recent frame on."""
        for k, v in flags.items():
            setattr(self.bodies[oid], k, v)
        if self.frames:
            self.frames[-1][oid] = self._snapshot(oid)

    def hold(self, n: int) -> None:
        for _ in range(n):
            self.emit()

    def move(self, delta, n: int, j0: float = 0.0, j1: float = 0.0) -> None:
        """Move the hand and carried bodies by ``delta`` over ``n`` frames.

        ``j0``/``j1`` make the first/last step a jump of that length, so the
        windowed displacement switches on or off within one frame.
        """
        delta = np.asarray(delta, float)
        length = float(np.linalg.norm(delta))
        n = max(int(n), 1)
        if length == 0.0:
            self.hold(n)
            return
        steps = np.full(n, length / n)
        if n > 2 and (j0 or j1):
            inner = (length - j0 - j1) / (n - 2)
            steps[1:-1] = inner
            steps[0] = j0 or inner
            steps[-1] = j1 or inner
            steps *= length / steps.sum()
        unit = delta / length
        who = ["hand", *sorted(self.carry)]
        for s in steps:
            for k in who:
                self.bodies[k].center = self.bodies[k].center + unit * s
            self.emit()

    def reshape(self, oid: str, half) -> None:
        self.bodies[oid].half = np.asarray(half, float)

    def stream(self, fps: float, label: str) -> SceneStream:
        frames = []
        for i, snap in enumerate(self.frames):
            objs = []
            for oid, (c, h, vis, intact) in snap.items():
                b = self.bodies[oid]
                objs.append(ObjectState(oid, Aabb.from_center(c, h), vis, intact, b.hand, b.ground))
            frames.append(FrameRecord(i, i / fps, tuple(objs)))
        return SceneStream(tuple(frames), fps, label, y_down=False)


class _Stage:
    """Layout helpers in a local frame: ``u`` along the work line, ``w`` across."""

    def __init__(self, rng: np.random.Generator, params: GenParams) -> None:
        self.rng = rng
        self.p = params
        self.u = _AXES[int(rng.integers(len(_AXES)))]
        self.w = np.array([self.u[2], 0.0, self.u[0]])
        self.rec = _Recorder()
        self.rec.add("table", [0.0, -0.02, 0.0], [0.5, 0.02, 0.5], ground=True)
        self.base = self.u * rng.uniform(0.08, 0.14) + self.w * rng.uniform(-0.08, 0.08)
        self.nested: set[frozenset[str]] = set()
        self.before_start: Callable[[], None] | None = None

    def size(self, lo: float, hi: float) -> float:
        return self.rng.uniform(lo, hi) * self.p.size_scale

    def dist(self, lo: float, hi: float) -> float:
        return self.rng.uniform(lo, hi) * self.p.distance_scale

    def at(self, u: float, y: float, w: float = 0.0) -> np.ndarray:
        return self.base + self.u * u + UP * y + self.w * w

    def box(self, oid: str, u: float, bottom: float, hu: float, hy: float,
            hw: float | None = None, w: float = 0.0) -> None:
        hw = hu if hw is None else hw
        half = np.abs(self.u) * hu + UP * hy + np.abs(self.w) * hw
        self.rec.add(oid, self.at(u, bottom + hy, w), half)

    def c(self, oid: str) -> np.ndarray:
        return self.rec.bodies[oid].center

    def half_u(self, oid: str) -> float:
        return float(self.rec.bodies[oid].half @ np.abs(self.u))

    def half_w(self, oid: str) -> float:
        return float(self.rec.bodies[oid].half @ np.abs(self.w))

    def half_y(self, oid: str) -> float:
        return float(self.rec.bodies[oid].half[1])

    def top(self, oid: str) -> float:
        return float(self.c(oid)[1]) + self.half_y(oid)

    def local(self, oid: str) -> tuple[float, float]:
        d = self.c(oid) - self.base
        return float(d @ self.u), float(d @ self.w)

    # -- hand motion ---------------------------------------------------------

    def start(self) -> None:
        if self.before_start is not None:
            self.before_start()
        self.rec.add("hand", self.at(-0.3, 0.4), [HAND_HALF] * 3, hand=True)
        self.rec.flag("hand", visible=False)
        self.rec.hold(PRE_ROLL)
        self.rec.flag("hand", visible=True)
        self.rec.hold(1)
        self.action_start = len(self.rec.frames) - 1

    def go(self, target, speed: float = 0.2) -> None:
        """Free-space hand move, kept under the approach speed that reads as GC."""
        d = np.asarray(target) - self.c("hand")
        v = min(speed * self.p.speed_scale, 0.25)
        self.rec.move(d, max(2, math.ceil(float(np.linalg.norm(d)) / v * 30)))

    def side_grasp(self, oid: str, bottom: float = 0.075, hover: float = 0.106,
                   moving: bool = False) -> None:
        """Grasp from the inner side; slow creep (HT) or moving contact (FMT)."""
        u, w = self.local(oid)
        off = self.half_u(oid) + HAND_HALF
        if moving:
            self.go(self.at(u - off - 0.04, bottom + HAND_HALF, w))
            self.rec.hold(12)
            self.rec.move(self.u * 0.04, 40)
        else:
            self.go(self.at(u - off - 0.012, hover + HAND_HALF, w))
            self.rec.hold(12)
            n = round(math.hypot(0.012, hover - bottom) / 0.010 * 30)
            self.rec.move(self.u * 0.012 - UP * (hover - bottom), n)
        self.rec.hold(15)
        self.rec.carry = {oid}

    def top_grasp(self, oid: str, moving: bool = False, hover: float = 0.106) -> None:
        """Grasp from above; the hand ends resting on the object's top face."""
        u, w = self.local(oid)
        top = self.top(oid)
        level = max(hover, top + 0.03)
        self.go(self.at(u, level + HAND_HALF, w))
        self.rec.hold(12)
        drop = level - top
        if moving:
            self.rec.move(-UP * drop, round(drop / 0.03 * 30))
        else:
            fast = drop - 0.008
            if fast > 0.002:
                self.rec.move(-UP * fast, round(fast / 0.03 * 30))
            self.rec.move(-UP * min(drop, 0.008), 24)
        self.rec.hold(15)
        self.rec.carry = {oid}

    def carry_to(self, oid: str, u: float, bottom: float, n: int, **kw) -> None:
        target = self.at(u, bottom + self.half_y(oid), self.local(oid)[1])
        self.rec.move(target - self.c(oid), n, **kw)

    def release_up(self) -> None:
        self.rec.carry = set()
        self.rec.move(UP * 0.012, 1)
        self.rec.move(UP * 0.08, 20)

    def release_back(self) -> None:
        self.rec.carry = set()
        self.rec.move(-self.u * 0.012, 1)
        self.rec.move(-self.u * 0.06 + UP * 0.05, 20)

    def leave(self) -> None:
        self.go(self.at(-0.35, 0.45))
        self.rec.hold(1)
        self.action_end = len(self.rec.frames) - 1


# ------------------------------------------------------------------ scripts


def _hide(s: _Stage) -> None:
    r = s.rec
    bh, hb = s.size(0.025, 0.035), s.size(0.04, 0.065)
    clear, h1 = s.size(0.012, 0.02), s.size(0.12, 0.15)
    d = s.dist(0.17, 0.22)
    s.box("cup", 0.0, 0.0, bh + clear, h1 / 2)
    s.box("block", d, 0.0, bh, hb / 2)
    s.nested.add(frozenset(("cup", "block")))
    s.start()
    s.side_grasp("cup")
    r.move(s.u * 0.015 + UP * 0.03, 1)
    # clear the block's height before moving toward it
    s.carry_to("cup", s.local("cup")[0], hb + 0.02, 8)
    s.carry_to("cup", d - 0.035, hb + 0.02, int(30 * (d - 0.05) / 0.12))
    s.carry_to("cup", d, hb, 8)
    s.carry_to("cup", d, 0.0, 6, j1=0.008)
    r.flag("block", visible=False)
    r.hold(15)
    s.release_back()
    s.leave()


def _put_on_top(s: _Stage) -> None:
    r = s.rec
    h1, b1 = s.size(0.05, 0.065), s.size(0.025, 0.035)
    hb, bh = s.size(0.04, 0.06), s.size(0.035, 0.045)
    d = s.dist(0.17, 0.22)
    s.box("box", 0.0, 0.0, b1, h1 / 2)
    s.box("block", d, 0.0, bh, hb / 2)
    s.start()
    s.top_grasp("box", moving=True)
    r.move(s.u * 0.015 + UP * 0.02, 1)
    r.move(UP * 0.11, 12)
    s.carry_to("box", d, 0.15, int(30 * d / 0.12))
    s.carry_to("box", d, hb + 0.012, 15, j1=0.008)
    r.move(-UP * 0.012, 1)
    r.hold(15)
    s.release_up()
    s.leave()


def _take_down(s: _Stage) -> None:
    r = s.rec
    hb, bh = s.size(0.05, 0.065), s.size(0.035, 0.045)
    h1, b1 = s.size(0.07, 0.09), s.size(0.025, 0.032)
    d = s.dist(0.17, 0.22)
    s.box("block", 0.0, 0.0, bh, hb / 2)
    s.box("box", 0.0, hb, b1, h1 / 2)
    s.start()
    s.side_grasp("box", bottom=max(0.105, hb + 0.01), hover=max(0.125, hb + 0.03))
    r.move(s.u * 0.015 + UP * 0.02, 1)
    # level transit clear of the block, then straight down
    s.carry_to("box", d, hb + 0.02, int(30 * d / 0.12))
    s.carry_to("box", d, 0.02, 10)
    s.carry_to("box", d, 0.0, 6, j1=0.008)
    r.hold(15)
    r.carry = set()
    r.move(-s.u * 0.012, 1)
    r.move(UP * 0.1, 20)  # the block is behind the hand; leave upward
    s.leave()


def _shake(s: _Stage) -> None:
    r = s.rec
    h1, b1 = s.size(0.16, 0.2), s.size(0.025, 0.035)
    s.box("bottle", 0.0, 0.0, b1, h1 / 2)
    s.start()
    s.top_grasp("bottle", moving=True)
    r.move(UP * 0.02, 1)
    r.move(UP * 0.03, 10)
    amp = s.rng.uniform(0.13, 0.16)
    for _ in range(3):
        r.move(s.u * amp, 10)
        r.move(-s.u * amp, 10)
    r.move(-UP * 0.05, 10, j1=0.008)
    r.hold(15)
    s.release_up()
    s.leave()


def _push(s: _Stage) -> None:
    r = s.rec
    h1, b1 = s.size(0.05, 0.07), s.size(0.03, 0.04)
    s.box("box", 0.0, 0.0, b1, h1 / 2)
    s.start()
    s.go(s.at(-b1 - HAND_HALF - 0.05, 0.106 + HAND_HALF, s.local("box")[1]))
    r.hold(12)
    r.move(-UP * 0.096, 96)
    r.hold(12)
    r.move(s.u * 0.05, 25)  # contact while moving, then keep pushing
    r.carry = {"box"}
    dist = s.dist(0.14, 0.18)
    r.move(s.u * dist, int(30 * dist / 0.06), j1=0.01)
    r.hold(15)
    s.release_back()
    s.leave()


def _lay(s: _Stage) -> None:
    r = s.rec
    h1, b1 = s.size(0.14, 0.16), s.size(0.02, 0.03)
    s.box("board", 0.0, 0.0, b1, h1 / 2)
    s.start()
    s.top_grasp("board")
    r.move(UP * 0.03, 1)
    r.move(UP * 0.09 + s.u * 0.02, 10)  # clear of the table before tipping
    hu, hy, hw = s.half_u("board"), s.half_y("board"), s.half_w("board")
    for k in range(1, 11):  # tip over: the box swaps its u and y extents
        f = k / 10
        old_top = s.top("board")
        r.reshape("board", np.abs(s.u) * (hu + (hy - hu) * f) + UP * (hy + (hu - hy) * f)
                  + np.abs(s.w) * hw)
        r.bodies["hand"].center = r.bodies["hand"].center - UP * (old_top - s.top("board"))
        r.move(s.u * 0.004, 1)
    u, _ = s.local("board")
    s.carry_to("board", u, 0.12, 15)  # settle at a fixed height, then set down
    s.carry_to("board", u, 0.012, 15, j1=0.008)
    r.move(-UP * 0.012, 1)
    r.hold(15)
    s.release_up()
    s.leave()


def _uncover(s: _Stage) -> None:
    r = s.rec
    bh, hb = s.size(0.025, 0.035), s.size(0.04, 0.065)
    clear, h1 = s.size(0.012, 0.02), s.size(0.12, 0.15)
    d = s.dist(0.17, 0.22)
    s.box("cup", 0.0, 0.0, bh + clear, h1 / 2)
    s.box("block", 0.0, 0.0, bh, hb / 2)
    s.nested.add(frozenset(("cup", "block")))
    r.bodies["block"].visible = False
    s.start()
    s.top_grasp("cup")
    r.move(UP * 0.03, 1)
    r.flag("block", visible=True)
    r.move(UP * (hb + 0.02), 12)
    s.carry_to("cup", d, 0.02, int(30 * d / 0.12))
    s.carry_to("cup", d, 0.0, 6, j1=0.008)
    r.hold(15)
    s.release_back()
    s.leave()


def _cut(s: _Stage) -> None:
    r = s.rec
    hb, bh = s.size(0.04, 0.06), s.size(0.035, 0.045)
    d = s.dist(0.17, 0.22)
    s.box("board", 0.0, 0.0, s.size(0.06, 0.07), 0.005, hw=s.size(0.12, 0.14))
    s.box("knife", 0.0, 0.01, 0.012, s.size(0.01, 0.014), hw=s.size(0.08, 0.1))
    s.box("block", d, 0.0, bh, hb / 2)
    s.start()
    s.top_grasp("knife")
    r.move(UP * 0.02, 1)
    s.carry_to("knife", d, hb + 0.03, int(30 * d / 0.12))
    r.move(-UP * 0.03, 10, j1=0.008)
    for _ in range(4):  # sawing strokes, sinking a little each time
        r.move(s.w * 0.04, 8)
        r.move(-s.w * 0.04, 8)
        r.move(-UP * 0.001, 1)
    r.flag("block", intact=False)
    r.move(UP * 0.04, 10, j0=0.01)
    s.carry_to("knife", d + 0.12, 0.02, 25)
    r.move(-UP * 0.02, 5, j1=0.008)
    r.hold(15)
    s.release_up()
    s.leave()


def _chop(s: _Stage) -> None:
    r = s.rec
    hb, bh = s.size(0.04, 0.06), s.size(0.035, 0.045)
    d, hc = s.dist(0.17, 0.22), s.size(0.15, 0.17)
    s.box("cleaver", 0.0, 0.0, 0.012, hc / 2, hw=s.size(0.04, 0.05))
    s.box("block", d, 0.0, bh, hb / 2)
    s.start()
    s.side_grasp("cleaver", bottom=0.108, moving=True)
    r.move(UP * 0.02, 1)
    r.move(UP * 0.12, 15)
    s.carry_to("cleaver", d, hb + 0.16, int(30 * d / 0.12))
    r.hold(10)
    r.move(-UP * 0.16, 5)  # fast strike
    r.flag("block", intact=False)
    r.hold(10)
    r.move(UP * 0.05, 10, j0=0.01)
    s.carry_to("cleaver", d + 0.12, 0.02, 25)
    r.move(-UP * 0.02, 5, j1=0.008)
    r.hold(15)
    s.release_back()
    s.leave()


def _stir(s: _Stage) -> None:
    r = s.rec
    d, ch, hc = s.dist(0.17, 0.22), s.size(0.035, 0.045), s.size(0.08, 0.1)
    hs = s.size(0.17, 0.19)
    s.box("spoon", 0.0, 0.0, 0.01, hs / 2, hw=0.012)
    s.box("bowl", d, 0.0, ch, hc / 2)
    s.start()
    s.side_grasp("spoon", bottom=0.11, hover=0.13)
    r.move(UP * 0.02, 1)
    r.move(UP * 0.08, 10)
    s.carry_to("spoon", d, hc + 0.02, int(30 * d / 0.12))
    r.move(-UP * 0.09, 10)
    rad = 0.02
    for _ in range(3):
        for a in range(8):
            a0, a1 = a * math.pi / 4, (a + 1) * math.pi / 4
            r.move(rad * (math.cos(a1) - math.cos(a0)) * s.u + rad * (math.sin(a1) - math.sin(a0)) * s.w, 3)
    r.move(UP * 0.1, 10, j0=0.01)
    s.carry_to("spoon", d + 0.12, 0.02, 25)
    r.move(-UP * 0.02, 5, j1=0.008)
    r.hold(15)
    s.release_back()
    s.leave()


SCRIPTS: dict[str, Callable[[_Stage], None]] = {
    "hide": _hide,
    "cut": _cut,
    "chop": _chop,
    "take_down": _take_down,
    "put_on_top": _put_on_top,
    "shake": _shake,
    "lay": _lay,
    "push": _push,
    "uncover": _uncover,
    "stir": _stir,
}


# --------------------------------------------------------------- assembly


def _overlap(a: _Body, b: _Body) -> bool:
    lo = np.maximum(a.center - a.half, b.center - b.half)
    hi = np.minimum(a.center + a.half, b.center + b.half)
    return bool(np.all(hi - lo > 1e-9))


def _check_layout(stage: _Stage) -> None:
    bodies = {k: v for k, v in stage.rec.bodies.items() if not v.ground and not v.hand}
    ids = sorted(bodies)
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            if frozenset((a, b)) in stage.nested:
                continue
            if _overlap(bodies[a], bodies[b]):
                raise GeometryError(f"infeasible geometry: {a} and {b} overlap at the start")
    for k in ids:
        body = bodies[k]
        if np.any(np.abs(body.center[[0, 2]]) + body.half[[0, 2]] > 0.5):
            raise GeometryError(f"infeasible geometry: {k} is off the table")


def _place_distractors(stage: _Stage, rng: np.random.Generator, count: int) -> None:
    """Static boxes well clear of the work line; they never interact."""
    sides = [1.0, -1.0]
    for k in range(count):
        side = sides[k % 2]
        u = -0.1 + 0.22 * (k // 2) + rng.uniform(0.0, 0.1)
        w = side * rng.uniform(0.24, 0.3)
        half = rng.uniform(0.02, 0.04)
        stage.rec.bodies[f"distractor{k + 1}"] = _Body(
            stage.at(u, half, w), np.abs(stage.u) * half + UP * half + np.abs(stage.w) * half
        )


def _streams(params: GenParams) -> tuple[np.random.Generator, np.random.Generator, np.random.Generator]:
    root = np.random.SeedSequence(params.seed, spawn_key=(ACTIONS.index(params.action),))
    geo, clutter, timing = root.spawn(3)
    return np.random.default_rng(geo), np.random.default_rng(clutter), np.random.default_rng(timing)


def generate_scene(params: GenParams) -> SceneStream:
    """Synthesize one labeled stream.

    The layout, the distractors and the duration come from three
    independent random streams of ``params.seed``, so changing the
    distractor count leaves the roled objects untouched.
    """
    geo, clutter, timing = _streams(params)
    stage = _Stage(geo, params)
    script = SCRIPTS[params.action]
    rec = stage.rec

    count = params.distractor_count
    if count is None:
        count = int(clutter.integers(0, 4))

    def setup() -> None:
        # runs once the script has laid out its objects, before the hand shows
        _place_distractors(stage, clutter, count)
        _check_layout(stage)

    stage.before_start = setup
    script(stage)

    mean, sd = params.duration or default_durations()[params.action]
    target = float(np.clip(timing.normal(mean, sd), mean - 2 * sd, mean + 2 * sd))
    active = (stage.action_end - stage.action_start) / params.fps
    spare = max(target - active, 1.0)
    lead = int(round(spare * timing.uniform(0.3, 0.5) * params.fps))
    tail = int(round(spare * params.fps)) - lead

    frames = rec.frames
    first, last = frames[stage.action_start], frames[stage.action_end]
    frames[stage.action_start + 1:stage.action_start + 1] = [dict(first) for _ in range(lead)]
    frames.extend(dict(last) for _ in range(tail))
    hidden = {k: v for k, v in frames[-1].items()}
    c, h, _, intact = hidden["hand"]
    hidden["hand"] = (c, h, False, intact)
    frames.extend(dict(hidden) for _ in range(PRE_ROLL))
    return rec.stream(params.fps, params.action)


# ------------------------------------------------------------------- suites


def variant_seed(master: int, action: str, variant: int) -> int:
    ss = np.random.SeedSequence(master, spawn_key=(ACTIONS.index(action), variant))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def _write_variant(job: tuple[str, GenParams]) -> tuple[str, bytes]:
    fname, params = job
    return fname, serialize_scene(generate_scene(params))


def generate_suite(
    out_dir: str | Path,
    actions: Sequence[str] = ACTIONS,
    variants_per_action: int = 30,
    seed: int = 0,
    jobs: int = 1,
    template: GenParams | None = None,
) -> dict:
    """Write ``variants_per_action`` scenes per action plus ``manifest.json``."""
    if variants_per_action < 1:
        raise ValueError("variants_per_action must be >= 1")
    for a in actions:
        if a not in ACTIONS:
            raise ValueError(f"unknown action {a!r}; expected one of {', '.join(ACTIONS)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    template = template or GenParams(ACTIONS[0])
    jobs_list, entries = [], []
    for a in actions:
        for v in range(variants_per_action):
            s = variant_seed(seed, a, v)
            fname = f"{a}_{v:02d}.jsonl"
            jobs_list.append((fname, replace(template, action=a, seed=s)))
            entries.append({"file": fname, "label": a, "seed": s, "variant": v})
    if jobs > 1 and len(jobs_list) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_write_variant, jobs_list, chunksize=4))
    else:
        results = [_write_variant(j) for j in jobs_list]
    for fname, data in results:
        (out / fname).write_bytes(data)
    manifest = {
        "master_seed": seed,
        "variants_per_action": variants_per_action,
        "actions": list(actions),
        "files": entries,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest
