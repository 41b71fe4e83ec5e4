"""Retrieval-style and clustering evaluation of document representations.

Document pairs are identified by 0-based column index tuples (i, j) with
i < j.  Rankings sort by nonincreasing cosine with ties broken by the pair
tuple, so every metric here is deterministic for a fixed input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import cut_tree, linkage
from scipy.spatial.distance import squareform

from . import linalg
from .corpus import TopicModel
from .errors import DimensionError, ParameterError, UndefinedMetricError

ALGORITHMS = (
    "single_link",
    "complete_link",
    "group_average",
    "kmeans_single_link",
    "kmeans_complete_link",
    "kmeans_group_average",
)

_LINKAGE = {
    "single_link": "single",
    "complete_link": "complete",
    "group_average": "average",
}

_KMEANS_MAX_ITER = 100


def unit_columns(z) -> np.ndarray:
    """Columns scaled to unit norm; zero columns stay zero."""
    a = linalg.as_matrix(z)
    norms = np.linalg.norm(a, axis=0)
    out = np.array(a)
    np.divide(out, norms, out=out, where=norms > 0.0)
    return out


def cosine_matrix(z) -> np.ndarray:
    """Pairwise column cosines; pairs involving a zero column get cosine 0."""
    x = unit_columns(z)
    c = np.clip(x.T @ x, -1.0, 1.0)
    np.fill_diagonal(c, 1.0)
    return c


@dataclass
class RankedPairs:
    """All unordered document pairs, ordered by nonincreasing cosine."""

    pairs: list[tuple[tuple[int, int], float]]
    n_docs: int


def rank_pairs(z) -> RankedPairs:
    a = linalg.as_matrix(z)
    n = a.shape[1]
    if n < 2:
        raise ParameterError("need at least two documents to rank pairs")
    c = cosine_matrix(a)
    entries = [
        ((i, j), float(c[i, j]))
        for i in range(n)
        for j in range(i + 1, n)
    ]
    entries.sort(key=lambda e: (-e[1], e[0]))
    return RankedPairs(pairs=entries, n_docs=n)


def _check_intra(ranked: RankedPairs, intra: set[tuple[int, int]]) -> set[tuple[int, int]]:
    if not intra:
        raise UndefinedMetricError("no intra-topic pairs; precision is undefined")
    n = ranked.n_docs
    for i, j in intra:
        if not (0 <= i < j < n):
            raise ParameterError(f"pair ({i}, {j}) is not a canonical pair of {n} docs")
    return intra


def pairwise_average_precision(ranked: RankedPairs, intra: set[tuple[int, int]]) -> float:
    """Mean over intra pairs p of (#intra ranked at or above p) / rank(p)."""
    intra = _check_intra(ranked, intra)
    precisions = []
    seen_intra = 0
    for rank, (pair, _) in enumerate(ranked.pairs, start=1):
        if pair in intra:
            seen_intra += 1
            precisions.append(seen_intra / rank)
    if len(precisions) != len(intra):
        raise ParameterError("intra pairs missing from the ranking")
    return math.fsum(precisions) / len(precisions)


def chance_precision(ranked: RankedPairs, intra: set[tuple[int, int]]) -> float:
    intra = _check_intra(ranked, intra)
    return len(intra) / len(ranked.pairs)


def kappa_average_precision(ranked: RankedPairs, intra: set[tuple[int, int]]) -> float:
    """Chance-corrected average precision: (pap - chance) / (1 - chance)."""
    chance = chance_precision(ranked, intra)
    if chance == 1.0:
        raise UndefinedMetricError("every pair is intra-topic; kappa is undefined")
    pap = pairwise_average_precision(ranked, intra)
    return (pap - chance) / (1.0 - chance)


def _cosine_distances(x: np.ndarray) -> np.ndarray:
    d = 1.0 - cosine_matrix(x)
    np.fill_diagonal(d, 0.0)
    return np.maximum(d, 0.0)


def _hierarchical(x: np.ndarray, k: int, algorithm: str) -> np.ndarray:
    z = linkage(squareform(_cosine_distances(x), checks=False), method=_LINKAGE[algorithm])
    return cut_tree(z, n_clusters=k).ravel().astype(np.intp)


def _spherical_kmeans(x: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    """Lloyd iterations with cosine similarity and renormalized centroids.

    Assignment ties go to the lowest cluster index; a cluster left empty is
    reseeded with the point farthest from its previous centroid.  Stops when
    assignments are stable or after a fixed iteration cap.
    """
    units = unit_columns(x)
    labels = labels.copy()
    centroids = np.zeros((units.shape[0], k))
    for _ in range(_KMEANS_MAX_ITER):
        for c in range(k):
            members = units[:, labels == c]
            if members.shape[1] == 0:
                continue  # keep the stale centroid for the reseed rule
            mean = members.mean(axis=1)
            norm = np.linalg.norm(mean)
            centroids[:, c] = mean / norm if norm > 0.0 else 0.0
        sims = centroids.T @ units
        new_labels = np.argmax(sims, axis=0).astype(np.intp)
        for c in range(k):
            if not np.any(new_labels == c):
                new_labels[int(np.argmin(sims[c]))] = c
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return labels


def cluster(z, k: int, algorithm: str) -> np.ndarray:
    """Cluster columns into exactly k groups; returns a label per column."""
    x = linalg.as_matrix(z)
    n = x.shape[1]
    if algorithm not in ALGORITHMS:
        raise ParameterError(f"unknown algorithm {algorithm!r}; pick from {ALGORITHMS}")
    if not 1 <= k <= n:
        raise ParameterError(f"k must be in [1, {n}], got {k}")
    if algorithm in _LINKAGE:
        return _hierarchical(x, k, algorithm)
    base = algorithm.removeprefix("kmeans_")
    return _spherical_kmeans(x, _hierarchical(x, k, base), k)


def contingency_table(
    labels: np.ndarray, topic_index: np.ndarray, n_clusters: int, n_topics: int
) -> np.ndarray:
    labels = np.asarray(labels)
    topic_index = np.asarray(topic_index)
    if labels.shape != topic_index.shape:
        raise DimensionError("labels and topic assignments differ in length")
    table = np.zeros((n_clusters, n_topics), dtype=np.int64)
    for c, t in zip(labels, topic_index):
        table[int(c), int(t)] += 1
    return table


def contingency_score(table) -> float:
    """Fraction of documents in cells that are the strict unique maximum of
    both their row and their column."""
    t = np.asarray(table, dtype=np.int64)
    if t.ndim != 2:
        raise DimensionError("contingency table must be 2-D")
    n = int(t.sum())
    if n == 0:
        raise UndefinedMetricError("empty contingency table")
    total = 0
    for i in range(t.shape[0]):
        for j in range(t.shape[1]):
            v = t[i, j]
            if v == 0:
                continue
            row = np.delete(t[i, :], j)
            col = np.delete(t[:, j], i)
            if (row < v).all() and (col < v).all():
                total += int(v)
    return total / n


@dataclass
class ClusteringOutcome:
    scores: dict[str, float]
    floor: float
    ceiling: float


def floor_ceiling(z, tm: TopicModel, k: int) -> ClusteringOutcome:
    """Contingency scores of all six algorithms plus their min and max.

    Requires a single-topic model: documents relevant to several topics have
    no unique true class to count against.
    """
    x = linalg.as_matrix(z)
    if x.shape[1] != tm.n_docs:
        raise DimensionError("representation and topic model differ in doc count")
    positives = (tm.relevance > 0.0).sum(axis=0)
    if (positives != 1).any():
        raise ParameterError("floor_ceiling needs single-topic documents")
    truth = np.argmax(tm.relevance, axis=0)
    scores = {
        name: contingency_score(
            contingency_table(cluster(x, k, name), truth, k, tm.n_topics)
        )
        for name in ALGORITHMS
    }
    return ClusteringOutcome(
        scores=scores, floor=min(scores.values()), ceiling=max(scores.values())
    )
