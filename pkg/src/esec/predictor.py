"""Causal column-by-column action prediction and predictive power."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .builder import Esec, build_esec, project_sec, read_chain
from .scene import SceneStream
from .similarity import SimilarityConfig, prefix_similarity, stack_chains

MODES = ("esec", "sec")


@dataclass(frozen=True)
class PredictorConfig:
    refs_per_class: int = 20
    margin: float = 20.0
    seed: int = 0
    persistence: int = 1
    mode: str = "esec"
    similarity: SimilarityConfig = field(default_factory=SimilarityConfig)

    def __post_init__(self) -> None:
        if self.refs_per_class < 1:
            raise ValueError("refs_per_class must be >= 1")
        if not (math.isfinite(self.margin) and self.margin > 0):
            raise ValueError("margin must be positive")
        if self.persistence < 1:
            raise ValueError("persistence must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


@dataclass(frozen=True)
class Prediction:
    label: str | None
    predicted: str | None
    column: int | None
    T: float
    Tot: float
    P: float
    trace: tuple[dict, ...] = ()
    margin: float = 20.0

    def to_dict(self, with_trace: bool = True) -> dict:
        out = {
            "label": self.label,
            "predicted": self.predicted,
            "column": self.column,
            "T": self.T,
            "Tot": self.Tot,
            "P": self.P,
            "margin": self.margin,
        }
        if with_trace:
            out["trace"] = [dict(t) for t in self.trace]
        return out


class ReferenceLibrary:
    """Exemplar chains grouped by action class."""

    def __init__(self, classes: dict[str, Sequence[Esec]]):
        self.classes = {k: tuple(v) for k, v in sorted(classes.items()) if v}

    @classmethod
    def from_chains(cls, chains: Iterable[Esec]) -> "ReferenceLibrary":
        groups: dict[str, list[Esec]] = defaultdict(list)
        for c in chains:
            if c.label is None:
                raise ValueError(f"library chain {c.name!r} has no label")
            groups[c.label].append(c)
        return cls(groups)

    @classmethod
    def from_dir(cls, path: str | Path, **build_kw) -> "ReferenceLibrary":
        return cls.from_chains(load_chains(path, **build_kw))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.classes)

    def __len__(self) -> int:
        return sum(len(v) for v in self.classes.values())


def load_chains(path: str | Path, **build_kw) -> list[Esec]:
    """Read every chain (``*.json``) or scene (``*.jsonl``) file in a directory."""
    from .scene import read_scene

    path = Path(path)
    if not path.is_dir():
        raise ValueError(f"not a directory: {path}")
    out = []
    for f in sorted(path.iterdir()):
        if f.suffix == ".jsonl":
            out.append(build_esec(read_scene(f), name=f.stem, **build_kw))
        elif f.suffix == ".json" and f.name != "manifest.json" and not f.name.endswith(".config.json"):
            out.append(read_chain(f))
    if not out:
        raise ValueError(f"no scene or chain files in {path}")
    return out


def predictive_power(T: float, Tot: float) -> float:
    if not Tot > 0:
        raise ValueError("total time must be positive")
    if T < 0 or T > Tot:
        raise ValueError(f"prediction moment {T} outside [0, {Tot}]")
    return (1.0 - T / Tot) * 100.0


def _same(a: Esec, b: Esec) -> bool:
    return a is b or (a.name is not None and a.name == b.name)


def sample_references(library: ReferenceLibrary, cfg: PredictorConfig, exclude: Esec | None = None):
    """Seeded per-class reference sample, leaving ``exclude`` out."""
    out: dict[str, list[Esec]] = {}
    for ci, name in enumerate(library.names):
        pool = [c for c in library.classes[name] if exclude is None or not _same(c, exclude)]
        if not pool:
            continue
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(ci,)))
        replace = len(pool) < cfg.refs_per_class
        idx = rng.choice(len(pool), size=cfg.refs_per_class, replace=replace)
        out[name] = [pool[i] for i in idx]
    return out


def _project(chain: Esec, mode: str) -> Esec:
    return project_sec(chain) if mode == "sec" and chain.n_groups == 3 else chain


def predict(
    source: Esec | SceneStream,
    library: ReferenceLibrary,
    cfg: PredictorConfig = PredictorConfig(),
) -> Prediction:
    """Compare the query to the library as its columns arrive.

    Fires at the first column where the best class mean similarity leads
    the runner-up by at least ``cfg.margin`` (for ``cfg.persistence``
    consecutive columns).
    """
    query = build_esec(source) if isinstance(source, SceneStream) else source
    refs = sample_references(library, cfg, exclude=query)
    if len(refs) < 2:
        raise ValueError("prediction undefined: the library needs at least two classes")
    q = _project(query, cfg.mode)
    names = list(refs)
    flat = [_project(c, cfg.mode) for n in names for c in refs[n]]
    sims = prefix_similarity(q, stack_chains(flat), cfg.similarity)
    sims = sims.reshape(len(names), cfg.refs_per_class, len(q))
    means = sims.mean(axis=1)  # (classes, columns)

    trace = tuple({n: float(means[c, k]) for c, n in enumerate(names)} for k in range(len(q)))
    order = np.argsort(-means, axis=0, kind="stable")
    best = order[0]
    lead = means[best, np.arange(len(q))] - means[order[1], np.arange(len(q))]
    Tot = query.total_time
    run = 0
    for k in range(len(q)):
        if lead[k] >= cfg.margin:
            run = run + 1 if run and best[k] == best[k - 1] else 1
        else:
            run = 0
        if run >= cfg.persistence:
            T = q.times[k] - query.t_start
            P = predictive_power(T, Tot) if Tot > 0 else 0.0
            return Prediction(query.label, names[best[k]], k, T, Tot, P, trace, cfg.margin)
    return Prediction(query.label, None, None, Tot, Tot, 0.0, trace, cfg.margin)


@dataclass(frozen=True)
class BenchSummary:
    predictions: tuple[Prediction, ...]
    names: tuple[str, ...] = ()

    @property
    def accuracy(self) -> float:
        if not self.predictions:
            return 0.0
        return sum(p.predicted == p.label for p in self.predictions) / len(self.predictions)

    def per_class(self) -> dict[str, dict]:
        out = {}
        for name in sorted({p.label for p in self.predictions if p.label is not None}):
            ps = [p for p in self.predictions if p.label == name]
            out[name] = {
                "n": len(ps),
                "mean_P": float(np.mean([p.P for p in ps])),
                "error_rate": sum(p.predicted != name for p in ps) / len(ps),
                "mean_column": float(np.mean([p.column for p in ps if p.column is not None]))
                if any(p.column is not None for p in ps) else None,
            }
        return out

    def confusion(self) -> dict[str, dict[str, int]]:
        out: dict[str, Counter] = defaultdict(Counter)
        for p in self.predictions:
            out[str(p.label)][str(p.predicted)] += 1
        return {k: dict(sorted(v.items())) for k, v in sorted(out.items())}

    def to_csv(self) -> str:
        lines = ["class,n,mean_P,error_rate,mean_column"]
        for name, row in self.per_class().items():
            col = "" if row["mean_column"] is None else repr(row["mean_column"])
            lines.append(f"{name},{row['n']},{row['mean_P']!r},{row['error_rate']!r},{col}")
        return "\n".join(lines) + "\n"


def _predict_chunk(args):
    chains, start, stop, cfg = args
    library = ReferenceLibrary.from_chains(chains)
    return [predict(chains[i], library, cfg) for i in range(start, stop)]


def bench_predict(chains: Sequence[Esec], cfg: PredictorConfig = PredictorConfig(), jobs: int = 1,
                  chunk: int = 25) -> BenchSummary:
    """Leave-self-out prediction of every chain against all the others."""
    chains = list(chains)
    names = [c.name for c in chains]
    if any(n is None for n in names) or len(set(names)) != len(names):
        raise ValueError("bench chains need unique names for leave-self-out")
    tasks = [(chains, s, min(s + chunk, len(chains)), cfg) for s in range(0, len(chains), chunk)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_predict_chunk, tasks))
    else:
        parts = [_predict_chunk(t) for t in tasks]
    preds = tuple(p for part in parts for p in part)
    return BenchSummary(preds, tuple(sorted({c.label for c in chains if c.label})))
