"""Positional dissimilarity between event chains, similarity matrices and clustering."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage, to_tree
from scipy.spatial.distance import squareform

from . import kernels
from .builder import Esec

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
LINKAGES = ("single", "complete", "average")


@dataclass(frozen=True)
class SimilarityConfig:
    normalize: bool = False
    clamp_nonnegative: bool = False


def column_diffs(counts: np.ndarray) -> np.ndarray:
    """Sum of per-cell ``sqrt(D1 + D2 + D3)`` for each column from difference counts."""
    counts = counts.astype(np.float64)
    return counts[..., 0] + counts[..., 1] * SQRT2 + counts[..., 2] * SQRT3


def _to_sim(dis, cfg: SimilarityConfig):
    if cfg.normalize:
        dis = dis / SQRT3
    sim = (1.0 - dis) * 100.0
    if cfg.clamp_nonnegative:
        sim = np.maximum(sim, 0.0)
    return sim


def _check(a: Esec, b: Esec) -> None:
    if len(a) < 1 or len(b) < 1:
        raise ValueError("empty event chain")
    if a.codes.shape[1] != b.codes.shape[1]:
        raise ValueError("cannot compare an ESEC with an SEC")


def _padded(codes: np.ndarray, p: int) -> np.ndarray:
    n = codes.shape[0]
    return codes[np.minimum(np.arange(p), n - 1)]


def esec_similarity(a: Esec, b: Esec, cfg: SimilarityConfig = SimilarityConfig()) -> float:
    """Similarity in percent; the shorter chain repeats its last column."""
    _check(a, b)
    p = max(len(a), len(b))
    # order the arguments so the kernel call is identical for (a, b) and (b, a)
    x, y = (a, b) if (len(a), a.codes.tobytes()) <= (len(b), b.codes.tobytes()) else (b, a)
    counts = kernels.diff_counts(_padded(y.codes, p), x.codes[None], np.array([len(x)]))[0]
    total = float(np.cumsum(column_diffs(counts))[-1])
    return float(_to_sim(total / (10.0 * p), cfg))


def stack_chains(chains: Sequence[Esec]) -> tuple[np.ndarray, np.ndarray]:
    """Stack chains into a (M, L, G, 10) array plus their column counts."""
    lengths = np.array([len(c) for c in chains], dtype=np.int64)
    groups = chains[0].codes.shape[1] if chains else 3
    out = np.zeros((len(chains), int(lengths.max(initial=1)), groups, 10), dtype=np.int8)
    for m, c in enumerate(chains):
        out[m, : len(c)] = c.codes
    return out, lengths


def prefix_similarity(
    query: Esec,
    refs: Sequence[Esec] | tuple[np.ndarray, np.ndarray],
    cfg: SimilarityConfig = SimilarityConfig(),
) -> np.ndarray:
    """Sim of the first ``k`` query columns against each reference cut to ``k`` columns.

    Returns an (M, n) array whose column ``k - 1`` holds the values for
    prefixes of length ``k``.
    """
    if isinstance(refs, tuple) and len(refs) == 2 and isinstance(refs[0], np.ndarray):
        stacked, lengths = refs
    else:
        stacked, lengths = stack_chains(refs)
    if stacked.shape[0] and stacked.shape[2] != query.codes.shape[1]:
        raise ValueError("cannot compare an ESEC with an SEC")
    counts = kernels.diff_counts(query.codes, stacked, lengths)
    cum = np.cumsum(column_diffs(counts), axis=1)
    k = np.arange(1, len(query) + 1, dtype=np.float64)
    return _to_sim(cum / (10.0 * k), cfg)


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        n = len(self.labels)
        if values.shape != (n, n):
            raise ValueError(f"matrix shape {values.shape} does not match {n} labels")
        if len(set(self.labels)) != n:
            raise ValueError("duplicate labels")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "values", values)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", *self.labels])
        for lab, row in zip(self.labels, self.values):
            w.writerow([lab, *(repr(float(v)) for v in row)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SimilarityMatrix":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or not rows[0] or rows[0][0] != "label":
            raise ValueError("matrix CSV must start with a 'label' header")
        labels = rows[0][1:]
        body = rows[1:]
        if [r[0] for r in body] != labels:
            raise ValueError("row labels do not match column labels")
        try:
            values = np.array([[float(v) for v in r[1:]] for r in body])
        except ValueError as exc:
            raise ValueError(f"bad matrix value: {exc}") from None
        return cls(tuple(labels), values)


def _matrix_rows(args) -> list[list[float]]:
    items, rows, cfg = args
    return [[esec_similarity(items[i], items[j], cfg) for j in range(i + 1, len(items))] for i in rows]


def similarity_matrix(
    items: Sequence[Esec],
    cfg: SimilarityConfig = SimilarityConfig(),
    labels: Sequence[str] | None = None,
    jobs: int = 1,
) -> SimilarityMatrix:
    """All-pairs similarity, computed once per unordered pair."""
    if not items:
        raise ValueError("need at least one item")
    if labels is None:
        labels = [c.name or f"item{k}" for k, c in enumerate(items)]
    labels = tuple(labels)
    if len(set(labels)) != len(labels):
        raise ValueError("duplicate labels")
    items = list(items)
    n = len(items)
    # interleaved rows balance the triangular workload
    parts = max(1, min(jobs, n))
    tasks = [(items, list(range(k, n, parts)), cfg) for k in range(parts)]
    if parts > 1:
        with ProcessPoolExecutor(max_workers=parts) as pool:
            results = list(pool.map(_matrix_rows, tasks))
    else:
        results = [_matrix_rows(t) for t in tasks]
    values = np.full((n, n), 100.0)
    for (_, rows, _), part in zip(tasks, results):
        for i, row in zip(rows, part):
            values[i, i + 1:] = row
            values[i + 1:, i] = row
    if cfg.clamp_nonnegative:
        values = np.maximum(values, 0.0)
    return SimilarityMatrix(labels, values)


@dataclass(frozen=True)
class Dendrogram:
    tree: dict
    newick: str
    clusters: tuple[tuple[str, ...], ...]
    threshold: float
    method: str

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "threshold": self.threshold,
            "tree": self.tree,
            "newick": self.newick,
            "clusters": [list(c) for c in self.clusters],
        }


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _newick(node, labels, parent_height: float | None) -> str:
    branch = "" if parent_height is None else ":" + _fmt(parent_height - node.dist)
    if node.is_leaf():
        return labels[node.id] + branch
    left = _newick(node.get_left(), labels, node.dist)
    right = _newick(node.get_right(), labels, node.dist)
    return f"({left},{right})" + branch


def _tree(node, labels) -> dict:
    if node.is_leaf():
        return {"label": labels[node.id], "height": 0.0}
    return {
        "left": _tree(node.get_left(), labels),
        "right": _tree(node.get_right(), labels),
        "height": float(node.dist),
    }


def cluster_dendrogram(
    matrix: SimilarityMatrix, threshold: float = 0.5, method: str = "average"
) -> Dendrogram:
    """Agglomerative clustering on ``d = 1 - Sim/100`` and a flat cut at ``threshold``."""
    if method not in LINKAGES:
        raise ValueError(f"linkage must be one of {LINKAGES}")
    values = matrix.values
    if not np.allclose(values, values.T, rtol=0.0, atol=1e-12):
        raise ValueError("matrix is not symmetric")
    labels = matrix.labels
    n = len(labels)
    if n == 1:
        return Dendrogram({"label": labels[0], "height": 0.0}, labels[0] + ";",
                          ((labels[0],),), threshold, method)
    dist = 1.0 - values / 100.0
    dist = (dist + dist.T) / 2.0
    np.fill_diagonal(dist, 0.0)
    z = linkage(squareform(dist, checks=False), method=method)
    flat = fcluster(z, t=threshold, criterion="distance")
    groups: dict[int, list[str]] = {}
    for lab, c in zip(labels, flat):
        groups.setdefault(int(c), []).append(lab)
    clusters = tuple(sorted((tuple(g) for g in groups.values()), key=lambda g: labels.index(g[0])))
    root = to_tree(z)
    return Dendrogram(_tree(root, labels), _newick(root, labels, None) + ";",
                      clusters, threshold, method)
