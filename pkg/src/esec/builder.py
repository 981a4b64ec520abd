"""Role assignment, relation tracking and event-chain construction."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import kernels
from .dynamic import DynamicConfig
from .scene import SceneStream
from .static import StaticConfig
from .symbols import CODE, PAIR_NAMES, PAIRS, ROLES, SYMBOLS

GROUPS = ("tn", "ssr", "dsr")
_U, _T, _N, _X, _A = (CODE[s] for s in ("U", "T", "N", "X", "A"))
_SYMBOL_ARRAY = np.array(SYMBOLS, dtype=object)


@dataclass(frozen=True)
class RoleMap:
    """Object ids bound to the roles H, G, 1, 2 and 3, with binding frames."""

    hand: str | None = None
    ground: str | None = None
    role1: str | None = None
    role2: str | None = None
    role3: str | None = None
    assigned: tuple[tuple[str, int], ...] = ()

    def get(self, role: str) -> str | None:
        return {"H": self.hand, "G": self.ground, "1": self.role1,
                "2": self.role2, "3": self.role3}[role]

    def frame_of(self, role: str) -> int | None:
        return dict(self.assigned).get(role)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {r: self.get(r) for r in ROLES}
        out["assigned"] = {r: f for r, f in self.assigned}
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "RoleMap":
        assigned = tuple((str(r), int(f)) for r, f in (d.get("assigned") or {}).items())
        return cls(d.get("H"), d.get("G"), d.get("1"), d.get("2"), d.get("3"), assigned)


@dataclass(frozen=True)
class EsecColumn:
    t: float
    frame: int
    tn: tuple[str, ...]
    ssr: tuple[str, ...] = ()
    dsr: tuple[str, ...] = ()


@dataclass(frozen=True, eq=False)
class Esec:
    """Event chain: ``codes`` has shape (columns, groups, 10) of symbol codes.

    An ESEC has the three groups tn/ssr/dsr; an SEC (see :class:`Sec`) only tn.
    """

    codes: np.ndarray
    times: tuple[float, ...]
    frames: tuple[int, ...]
    roles: RoleMap = field(default_factory=RoleMap)
    label: str | None = None
    t_start: float = 0.0
    t_end: float = 0.0
    name: str | None = None

    n_groups = 3

    def __post_init__(self) -> None:
        codes = np.array(self.codes, dtype=np.int8, order="C")  # never freeze the caller's array
        if codes.ndim != 3 or codes.shape[1:] != (self.n_groups, 10):
            raise ValueError(f"codes must have shape (n, {self.n_groups}, 10), got {codes.shape}")
        if codes.shape[0] < 1:
            raise ValueError("an event chain needs at least one column")
        if not (len(self.times) == len(self.frames) == codes.shape[0]):
            raise ValueError("times and frames must match the column count")
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "frames", tuple(int(f) for f in self.frames))

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return (
            np.array_equal(self.codes, other.codes)
            and self.times == other.times
            and self.frames == other.frames
            and self.roles == other.roles
            and self.label == other.label
            and self.t_start == other.t_start
            and self.t_end == other.t_end
        )

    __hash__ = None  # type: ignore[assignment]

    def __len__(self) -> int:
        return self.codes.shape[0]

    @property
    def n_columns(self) -> int:
        return self.codes.shape[0]

    @property
    def total_time(self) -> float:
        return self.t_end - self.t_start

    def symbols(self, group: str) -> list[list[str]]:
        """Rows of one sub-table as symbol strings, indexed [column][pair]."""
        g = GROUPS.index(group)
        return _SYMBOL_ARRAY[self.codes[:, g, :]].tolist()

    def cell(self, column: int, group: str, pair: str) -> str:
        return SYMBOLS[self.codes[column, GROUPS.index(group), PAIR_NAMES.index(pair)]]

    @property
    def columns(self) -> list[EsecColumn]:
        subs = [self.symbols(g) for g in GROUPS[: self.n_groups]]
        out = []
        for k in range(len(self)):
            parts = [tuple(s[k]) for s in subs]
            out.append(EsecColumn(self.times[k], self.frames[k], *parts))
        return out

    def truncate(self, k: int) -> "Esec":
        if not 1 <= k <= len(self):
            raise ValueError(f"cannot keep {k} of {len(self)} columns")
        return type(self)(self.codes[:k], self.times[:k], self.frames[:k], self.roles,
                          self.label, self.t_start, self.t_end, self.name)

    def with_name(self, name: str | None) -> "Esec":
        return type(self)(self.codes, self.times, self.frames, self.roles,
                          self.label, self.t_start, self.t_end, name)

    # -------------------------------------------------------------- json
    def to_dict(self) -> dict:
        cols = []
        for c in self.columns:
            rec: dict[str, Any] = {"t": c.t, "frame": c.frame, "tn": list(c.tn)}
            if self.n_groups == 3:
                rec["ssr"] = list(c.ssr)
                rec["dsr"] = list(c.dsr)
            cols.append(rec)
        return {
            "kind": "esec" if self.n_groups == 3 else "sec",
            "label": self.label,
            "name": self.name,
            "t_start": self.t_start,
            "t_end": self.t_end,
            "roles": self.roles.to_dict(),
            "pairs": list(PAIR_NAMES),
            "columns": cols,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, d: dict) -> "Esec":
        kind = d.get("kind", "esec")
        target: type[Esec] = Sec if kind == "sec" else Esec
        if list(d.get("pairs", PAIR_NAMES)) != list(PAIR_NAMES):
            raise ValueError("pair order does not match the fixed row order")
        cols = d.get("columns") or []
        if not cols:
            raise ValueError("an event chain needs at least one column")
        try:
            codes = np.array(
                [[[CODE[s] for s in c[g]] for g in GROUPS[: target.n_groups]] for c in cols],
                dtype=np.int8,
            )
        except KeyError as exc:
            raise ValueError(f"unknown relation symbol {exc.args[0]!r}") from None
        return target(
            codes,
            tuple(c["t"] for c in cols),
            tuple(c["frame"] for c in cols),
            RoleMap.from_dict(d.get("roles") or {}),
            d.get("label"),
            float(d.get("t_start", cols[0]["t"])),
            float(d.get("t_end", cols[-1]["t"])),
            d.get("name"),
        )

    @classmethod
    def from_json(cls, text: str) -> "Esec":
        return cls.from_dict(json.loads(text))


class Sec(Esec):
    """Touching/non-touching sub-table only."""

    n_groups = 1


def read_chain(path: str | Path) -> Esec:
    path = Path(path)
    chain = Esec.from_json(path.read_text())
    return chain if chain.name else chain.with_name(path.stem)


def write_chain(path: str | Path, chain: Esec) -> None:
    Path(path).write_text(chain.to_json() + "\n")


# ------------------------------------------------------------------ builder

def _window_frames(stream: SceneStream) -> tuple[int, int]:
    arr = stream.arrays
    if arr.hand is None:
        raise ValueError("no action window: the stream has no hand")
    seen = np.flatnonzero(arr.present[:, arr.hand] & arr.visible[:, arr.hand])
    if seen.size == 0:
        raise ValueError("no action window: the hand is never visible")
    return int(seen[0]), int(seen[-1])


def action_window(stream: SceneStream) -> tuple[float, float]:
    """Times of the first and last frame with the hand visible."""
    s, e = _window_frames(stream)
    return stream.frames[s].t, stream.frames[e].t


def assign_roles(
    stream: SceneStream,
    static_cfg: StaticConfig = StaticConfig(),
    literal_roles: bool = False,
) -> RoleMap:
    """Bind objects to roles in the order they start interacting.

    Role 1 is the first object the hand touches.  By default the next
    free role goes to the next object whose touching state with an
    already bound object (hand included, ground excluded) changes; with
    ``literal_roles`` role 2 is the first object that stops touching
    object 1 and role 3 the first object that starts touching it.
    Returns positions into ``stream.arrays.ids`` via the ``assigned``
    frames (array positions, not record indices).
    """
    arr = stream.arrays
    s, e = _window_frames(stream)
    ids = arr.ids
    h, g = arr.hand, arr.ground
    cand = [k for k in range(len(ids)) if k not in (h, g)]
    frames: list[tuple[str, int]] = [("H", s)]
    if g is not None:
        frames.append(("G", s))
    roles: dict[str, int] = {}
    if cand:
        pairs = np.array([(a, b) for a in cand for b in [h, *cand] if a != b], dtype=np.intp)
        tn, _ = kernels.pair_static(arr, pairs, static_cfg)
        col = {(int(a), int(b)): n for n, (a, b) in enumerate(pairs)}

        hand_touch = np.stack([tn[s : e + 1, col[(c, h)]] == _T for c in cand], axis=1)
        hits = np.flatnonzero(hand_touch.any(axis=1))
        if hits.size:
            f1 = s + int(hits[0])
            first = sorted((ids[c], c) for n, c in enumerate(cand) if hand_touch[hits[0], n])
            roles["1"] = first[0][1]
            frames.append(("1", f1))
            order = ["2", "3"]
            bound_at = {h: s, first[0][1]: f1}
            steady = arr.present & arr.visible & arr.intact
            for f in range(f1 + 1, e + 1):
                if not order:
                    break
                found = []
                for c in cand:
                    if c in bound_at:
                        continue
                    if literal_roles:
                        r1 = roles["1"]
                        prev, now = tn[f - 1, col[(c, r1)]], tn[f, col[(c, r1)]]
                        want = _N if order[0] == "2" else _T
                        want_prev = _T if order[0] == "2" else _N
                        if prev == want_prev and now == want:
                            found.append((ids[c], c))
                    else:
                        for r, at in bound_at.items():
                            # a bound object vanishing or breaking changes every
                            # relation it has; that says nothing about ``c``
                            if not (steady[f - 1, r] and steady[f, r]):
                                continue
                            if at < f and tn[f - 1, col[(c, r)]] != tn[f, col[(c, r)]]:
                                found.append((ids[c], c))
                                break
                for _, c in sorted(found):
                    if not order:
                        break
                    role = order.pop(0)
                    roles[role] = c
                    bound_at[c] = f
                    frames.append((role, f))
                    if literal_roles:
                        break
    frames.sort(key=lambda rf: ROLES.index(rf[0]))
    name = lambda r: None if r not in roles else ids[roles[r]]  # noqa: E731
    return RoleMap(
        hand=ids[h],
        ground=None if g is None else ids[g],
        role1=name("1"),
        role2=name("2"),
        role3=name("3"),
        assigned=tuple(frames),
    )


def relation_vectors(
    stream: SceneStream,
    roles: RoleMap,
    static_cfg: StaticConfig = StaticConfig(),
    dyn_cfg: DynamicConfig = DynamicConfig(),
) -> np.ndarray:
    """Per-frame (frames, 3, 10) relation codes over the action window."""
    arr = stream.arrays
    s, e = _window_frames(stream)
    n = e - s + 1
    out = np.full((n, 3, 10), _U, dtype=np.int8)
    idx = {r: (None if roles.get(r) is None else arr.index(roles.get(r))) for r in ROLES}
    live = [(p, idx[a], idx[b]) for p, (a, b) in enumerate(PAIRS)
            if idx[a] is not None and idx[b] is not None]
    if not live:
        return out
    pairs = np.array([(i, j) for _, i, j in live], dtype=np.intp)
    tn, ssr = kernels.pair_static(arr, pairs, static_cfg)
    dsr = kernels.dsr_series(arr, pairs, static_cfg, dyn_cfg)
    w = dyn_cfg.window
    if dsr.shape[0] > w:
        # frames without a full history take the first computable label,
        # mirroring the hold at the trailing edge
        first = dsr[w]
        dsr[:w] = np.where((first == _X) | (first == _A), _U, first)
    tn, ssr, dsr = tn[s : e + 1], ssr[s : e + 1], dsr[s : e + 1]
    gone = (tn == _X) | (tn == _A)
    ssr = np.where(gone, tn, ssr)
    dsr = np.where(gone, tn, dsr)
    for n_col, (p, _, _) in enumerate(live):
        a, b = PAIRS[p]
        start = max(roles.frame_of(a) or s, roles.frame_of(b) or s) - s
        out[start:, 0, p] = tn[start:, n_col]
        out[start:, 1, p] = ssr[start:, n_col]
        out[start:, 2, p] = dsr[start:, n_col]
    return out


def compress(vectors: np.ndarray, debounce: int = 0) -> list[int]:
    """Indices of the frames that open a new column.

    A change only opens a column when the new vector then persists for
    ``debounce`` further frames.
    """
    vectors = np.asarray(vectors)
    n = vectors.shape[0]
    if n == 0:
        return []
    flat = vectors.reshape(n, -1)
    keep = [0]
    current = flat[0]
    for f in range(1, n):
        if np.array_equal(flat[f], current):
            continue
        stop = f + debounce
        if stop >= n or not all(np.array_equal(flat[f], flat[q]) for q in range(f + 1, stop + 1)):
            continue
        keep.append(f)
        current = flat[f]
    return keep


def build_esec(
    stream: SceneStream,
    static_cfg: StaticConfig = StaticConfig(),
    dyn_cfg: DynamicConfig = DynamicConfig(),
    *,
    literal_roles: bool = False,
    debounce: int = 0,
    name: str | None = None,
) -> Esec:
    """Extract the event chain of a stream, one column per relation change."""
    roles = assign_roles(stream, static_cfg, literal_roles)
    vectors = relation_vectors(stream, roles, static_cfg, dyn_cfg)
    s, e = _window_frames(stream)
    keep = compress(vectors, debounce)
    return Esec(
        vectors[keep],
        tuple(stream.frames[s + k].t for k in keep),
        tuple(stream.frames[s + k].index for k in keep),
        roles,
        stream.label,
        stream.frames[s].t,
        stream.frames[e].t,
        name,
    )


def project_sec(chain: Esec) -> Sec:
    """Keep the touching sub-table and merge adjacent equal columns."""
    tn = chain.codes[:, :1, :]
    keep = compress(tn)
    return Sec(
        tn[keep],
        tuple(chain.times[k] for k in keep),
        tuple(chain.frames[k] for k in keep),
        chain.roles,
        chain.label,
        chain.t_start,
        chain.t_end,
        chain.name,
    )


def chain_from_vectors(
    vectors: np.ndarray, times: Sequence[float], frames: Sequence[int], **kw
) -> Esec:
    """Compress a replayed per-frame vector sequence into a chain."""
    keep = compress(vectors)
    return Esec(np.asarray(vectors)[keep], tuple(times[k] for k in keep),
                tuple(frames[k] for k in keep), **kw)
