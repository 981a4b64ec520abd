"""Two-agent predictive action chaining and its Monte-Carlo evaluation."""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.special import ndtr, ndtri

from . import kernels

MODES = ("esec", "sec", "none")
ALIASES = {"take": "take_down", "put": "put_on_top", "put_on": "put_on_top"}
FIELDS = ("name", "dur_mean", "dur_sd", "esec_mean", "esec_sd", "sec_mean", "sec_sd")


@dataclass(frozen=True)
class ActionTiming:
    name: str
    dur_mean: float
    dur_sd: float
    esec_mean: float
    esec_sd: float
    sec_mean: float
    sec_sd: float

    def __post_init__(self) -> None:
        values = [self.dur_mean, self.dur_sd, self.esec_mean, self.esec_sd, self.sec_mean, self.sec_sd]
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"{self.name}: non-finite timing")
        if min(self.dur_sd, self.esec_sd, self.sec_sd) < 0:
            raise ValueError(f"{self.name}: negative standard deviation")
        for pred in (self.esec_mean, self.sec_mean):
            if not 0 < pred <= self.dur_mean:
                raise ValueError(f"{self.name}: prediction mean must lie in (0, duration]")

    def pred(self, mode: str) -> tuple[float, float]:
        if mode == "esec":
            return self.esec_mean, self.esec_sd
        if mode == "sec":
            return self.sec_mean, self.sec_sd
        if mode == "none":
            return self.dur_mean, self.dur_sd
        raise ValueError(f"mode must be one of {MODES}")


def normalize_name(name: str) -> str:
    key = name.strip().lower().replace(" ", "_").replace("-", "_")
    return ALIASES.get(key, key)


def parse_table(text: str) -> list[ActionTiming]:
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows or set(FIELDS) - set(rows[0]):
        raise ValueError(f"timing table needs columns {', '.join(FIELDS)}")
    out = []
    for r in rows:
        try:
            out.append(ActionTiming(normalize_name(r["name"]), *(float(r[f]) for f in FIELDS[1:])))
        except (TypeError, ValueError) as exc:
            raise ValueError(f"bad timing row {r.get('name')!r}: {exc}") from None
    names = [t.name for t in out]
    if len(set(names)) != len(names):
        raise ValueError("duplicate action in timing table")
    return out


def load_table(path: str | Path | None = None) -> list[ActionTiming]:
    """Read a timing table; the bundled human averages when ``path`` is None."""
    if path is None:
        text = resources.files("esec").joinpath("data/table1.csv").read_text()
    else:
        text = Path(path).read_text()
    return parse_table(text)


def resolve(table: Sequence[ActionTiming], order: str | Sequence[str] | None) -> list[ActionTiming]:
    by_name = {t.name: t for t in table}
    if order is None:
        return list(table)
    names = order.split(",") if isinstance(order, str) else list(order)
    out = []
    for n in names:
        key = normalize_name(n)
        if key not in by_name:
            raise ValueError(f"unknown action {n!r}; table has {', '.join(by_name)}")
        out.append(by_name[key])
    return out


@dataclass(frozen=True)
class ScheduledAction:
    name: str
    agent: str
    start: float
    end: float
    prediction: float  # absolute time at which the next agent may start


@dataclass(frozen=True)
class ChainTimeline:
    actions: tuple[ScheduledAction, ...]
    completion: float
    total_unchained: float
    savings: float
    P_chain: float
    mode: str = "esec"

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "completion": self.completion,
            "total_unchained": self.total_unchained,
            "savings": self.savings,
            "P_chain": self.P_chain,
            "actions": [vars(a) for a in self.actions],
        }


def schedule_chain(
    timings: Sequence[tuple[float, float]],
    mode: str = "esec",
    names: Sequence[str] | None = None,
) -> ChainTimeline:
    """Alternate agents A, B, A, ...; each start waits for the previous action's
    prediction moment and for the same agent's own previous action to end."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if not timings:
        raise ValueError("need at least one action")
    names = list(names) if names is not None else [f"a{k + 1}" for k in range(len(timings))]
    dur = [float(d) for d, _ in timings]
    pred = dur[:] if mode == "none" else [float(p) for _, p in timings]
    for k, (d, p) in enumerate(zip(dur, pred)):
        if not d > 0:
            raise ValueError(f"action {k + 1}: duration must be positive")
        if p < 0 or p > d:
            raise ValueError(f"action {k + 1}: prediction moment {p} exceeds duration {d}")
    acts: list[ScheduledAction] = []
    start = 0.0
    for k in range(len(dur)):
        if k > 0:
            start = start + pred[k - 1]
            if k >= 2:
                start = max(start, acts[k - 2].end)
        acts.append(ScheduledAction(names[k], "AB"[k % 2], start, start + dur[k], start + pred[k]))
    completion = max(a.end for a in acts)
    total = sum(dur)
    return ChainTimeline(tuple(acts), completion, total, total - completion,
                         (1.0 - completion / total) * 100.0, mode)


def chain_from_table(table: Sequence[ActionTiming], order, mode: str = "esec") -> ChainTimeline:
    """Schedule the table's mean timings in the given order."""
    acts = resolve(table, order)
    timings = [(t.dur_mean, t.pred(mode)[0]) for t in acts]
    return schedule_chain(timings, mode, [t.name for t in acts])


# -------------------------------------------------------------- Monte Carlo

PERMUTATIONS = np.array(list(itertools.permutations(range(5))), dtype=np.intp)


def _truncnorm(u, mean, sd, lower, upper):
    """Inverse-CDF draw from N(mean, sd) truncated to [lower, upper]."""
    sd_safe = np.where(sd > 0, sd, 1.0)
    a = ndtr((lower - mean) / sd_safe)
    b = ndtr((upper - mean) / sd_safe)
    x = mean + sd_safe * ndtri(a + u * (b - a))
    x = np.where(sd > 0, x, mean)
    return np.clip(x, lower, upper)


def draw_sample(table: Sequence[ActionTiming], seed: int, index: int) -> np.ndarray:
    """(n, 3) array of duration, ESEC and SEC prediction moments for one base sample."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    u = rng.random((len(table), 3))
    arr = np.array([[t.dur_mean, t.dur_sd, t.esec_mean, t.esec_sd, t.sec_mean, t.sec_sd]
                    for t in table])
    tiny = 1e-6
    dur = _truncnorm(u[:, 0], arr[:, 0], arr[:, 1], tiny, np.inf)
    esec = _truncnorm(u[:, 1], arr[:, 2], arr[:, 3], tiny, dur)
    sec = _truncnorm(u[:, 2], arr[:, 4], arr[:, 5], tiny, dur)
    return np.stack([dur, esec, sec], axis=1)


@dataclass
class _Acc:
    counts: np.ndarray
    n: int
    total: float
    total_sq: float
    total_p: float
    perm_sum: np.ndarray

    def merge(self, other: "_Acc") -> "_Acc":
        size = max(len(self.counts), len(other.counts))
        counts = np.zeros(size, dtype=np.int64)
        counts[: len(self.counts)] += self.counts
        counts[: len(other.counts)] += other.counts
        return _Acc(counts, self.n + other.n, self.total + other.total,
                    self.total_sq + other.total_sq, self.total_p + other.total_p,
                    self.perm_sum + other.perm_sum)


def _mc_chunk(args) -> _Acc:
    table, mode, seed, start, stop = args
    samples = np.stack([draw_sample(table, seed, b) for b in range(start, stop)])  # (B, 5, 3)
    dur = samples[:, :, 0]
    pred = dur if mode == "none" else samples[:, :, 1 if mode == "esec" else 2]
    dur_p = dur[:, PERMUTATIONS].reshape(-1, 5)  # (B*120, 5)
    pred_p = pred[:, PERMUTATIONS].reshape(-1, 5)
    comp = kernels.chain_completion(dur_p, pred_p)
    total = dur.sum(axis=1).repeat(len(PERMUTATIONS))
    p_chain = (1.0 - comp / total) * 100.0
    counts = np.bincount(np.floor(comp).astype(np.int64))
    perm_sum = comp.reshape(-1, len(PERMUTATIONS)).sum(axis=0)
    return _Acc(counts, comp.size, float(comp.sum()), float((comp * comp).sum()),
                float(p_chain.sum()), perm_sum)


@dataclass(frozen=True)
class MonteCarloResult:
    mode: str
    seed: int
    base_samples: int
    cases: int
    bin_starts: np.ndarray
    counts: np.ndarray
    mean: float
    sd: float
    mean_P: float
    perm_means: np.ndarray
    actions: tuple[str, ...]

    def stats(self) -> dict:
        return {
            "mode": self.mode,
            "seed": self.seed,
            "base_samples": self.base_samples,
            "cases": self.cases,
            "mean": self.mean,
            "sd": self.sd,
            "mean_P": self.mean_P,
            "bin_width": 1.0,
            "actions": list(self.actions),
        }

    def histogram_csv(self) -> str:
        lines = ["bin_start,count"]
        lines += [f"{int(b)},{int(c)}" for b, c in zip(self.bin_starts, self.counts)]
        return "\n".join(lines) + "\n"

    def permutations_csv(self) -> str:
        lines = ["order,mean_completion"]
        for perm, m in zip(PERMUTATIONS, self.perm_means):
            lines.append(f"{'|'.join(self.actions[i] for i in perm)},{m!r}")
        return "\n".join(lines) + "\n"


def monte_carlo(
    table: Sequence[ActionTiming],
    mode: str = "esec",
    base_samples: int = 10000,
    seed: int = 0,
    jobs: int = 1,
    chunk: int = 500,
) -> MonteCarloResult:
    """Completion-time statistics over all 120 orderings of every base sample.

    Each base sample has its own random stream derived from ``(seed, index)``
    and chunk boundaries do not depend on ``jobs``, so the result is the
    same for any degree of parallelism.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if len(table) != 5:
        raise ValueError("the Monte-Carlo evaluation needs exactly five actions")
    if base_samples < 1:
        raise ValueError("base_samples must be >= 1")
    table = list(table)
    tasks = [(table, mode, seed, s, min(s + chunk, base_samples)) for s in range(0, base_samples, chunk)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_mc_chunk, tasks))
    else:
        parts = [_mc_chunk(t) for t in tasks]
    acc = parts[0]
    for p in parts[1:]:
        acc = acc.merge(p)
    mean = acc.total / acc.n
    var = max(acc.total_sq / acc.n - mean * mean, 0.0)
    nz = np.flatnonzero(acc.counts)
    lo, hi = (int(nz[0]), int(nz[-1]) + 1) if nz.size else (0, 0)
    return MonteCarloResult(
        mode=mode,
        seed=seed,
        base_samples=base_samples,
        cases=acc.n,
        bin_starts=np.arange(lo, hi, dtype=np.int64),
        counts=acc.counts[lo:hi],
        mean=mean,
        sd=math.sqrt(var),
        mean_P=acc.total_p / acc.n,
        perm_means=acc.perm_sum / base_samples,
        actions=tuple(t.name for t in table),
    )
