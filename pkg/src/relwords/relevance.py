"""Per-cluster relevant-word scoring.

A word is relevant to a cluster when it occurs in many of the cluster's
documents but few documents elsewhere. The score combines an absolute
rate difference with a saturating rate quotient, so both dominant words and
words that are merely several times more frequent inside the cluster rank
highly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .clustering import NOISE
from .features import Vocabulary, build_vocabulary
from .text import TokenStream

DEFAULT_EPSILON = 1e-8

ClusterKey = Hashable


@dataclass(frozen=True)
class OccurrenceIndex:
    """Document-occurrence counts per (cluster, term).

    ``counts[c, i]`` is the number of documents in cluster c that contain
    term i at least once; ``sizes[c]`` the cluster's document count.
    """

    terms: tuple[str, ...]
    clusters: tuple[ClusterKey, ...]
    counts: np.ndarray
    sizes: np.ndarray

    def cluster_position(self, cluster: ClusterKey) -> int:
        try:
            return self.clusters.index(cluster)
        except ValueError:
            raise ValueError(f"unknown or empty cluster: {cluster!r}") from None


@dataclass(frozen=True)
class RelevanceTable:
    """All five scores per (cluster, term); every stored value is in [0, 1].

    ``fpr`` is clamped at 1 for storage; the raw value (mean + std can exceed
    1) is what the difference and quotient scores were computed from.
    """

    terms: tuple[str, ...]
    clusters: tuple[ClusterKey, ...]
    tpr: np.ndarray
    fpr: np.ndarray
    r_diff: np.ndarray
    r_quot: np.ndarray
    r: np.ndarray

    def cluster_position(self, cluster: ClusterKey) -> int:
        try:
            return self.clusters.index(cluster)
        except ValueError:
            raise ValueError(f"unknown cluster: {cluster!r}") from None

    def scores(self, cluster: ClusterKey, term: str) -> tuple[float, float, float, float, float]:
        c = self.cluster_position(cluster)
        i = self.terms.index(term)
        return (
            float(self.tpr[c, i]),
            float(self.fpr[c, i]),
            float(self.r_diff[c, i]),
            float(self.r_quot[c, i]),
            float(self.r[c, i]),
        )


def build_occurrence_index(
    streams: Sequence[TokenStream],
    vocab: Vocabulary,
    labels: Sequence[ClusterKey],
) -> OccurrenceIndex:
    """Count, per cluster, how many documents contain each vocabulary term.

    ``labels`` is one cluster id (or group name) per stream, in order.
    Documents labeled NOISE are excluded entirely: they form neither a target
    cluster nor a contrast cluster.
    """
    if len(streams) != len(labels):
        raise ValueError("labels length does not match stream count")
    kept = sorted({label for label in labels if label != NOISE})
    if not kept:
        raise ValueError("no clusters to score (all documents are noise)")
    positions = {label: c for c, label in enumerate(kept)}
    counts = np.zeros((len(kept), len(vocab.terms)), dtype=np.int64)
    sizes = np.zeros(len(kept), dtype=np.int64)
    for stream, label in zip(streams, labels):
        if label == NOISE:
            continue
        c = positions[label]
        sizes[c] += 1
        for term in set(stream.tokens):
            col = vocab.index.get(term)
            if col is not None:
                counts[c, col] += 1
    return OccurrenceIndex(
        terms=vocab.terms, clusters=tuple(kept), counts=counts, sizes=sizes
    )


def tpr(index: OccurrenceIndex, cluster: ClusterKey, term: str) -> float:
    """Fraction of the cluster's documents containing the term."""
    c = index.cluster_position(cluster)
    try:
        i = index.terms.index(term)
    except ValueError:
        raise ValueError(f"unknown term: {term!r}") from None
    return float(index.counts[c, i]) / float(index.sizes[c])


def fpr(index: OccurrenceIndex, cluster: ClusterKey, term: str) -> float:
    """Mean plus population std of the term's TPRs over all other clusters.

    Mean-plus-std rather than a maximum keeps one small cluster from
    dominating the estimate. With no other cluster the value is 0 and scores
    reduce to plain occurrence rates.
    """
    c = index.cluster_position(cluster)
    try:
        i = index.terms.index(term)
    except ValueError:
        raise ValueError(f"unknown term: {term!r}") from None
    others = [l for l in range(len(index.clusters)) if l != c]
    if not others:
        warnings.warn("single cluster: FPR is 0 and scores reduce to occurrence rates")
        return 0.0
    rates = index.counts[others, i] / index.sizes[others]
    return float(rates.mean() + rates.std())


def score_diff(tpr_value, fpr_value):
    """Rate difference clamped at zero: max(TPR - FPR, 0)."""
    return np.maximum(np.asarray(tpr_value, dtype=np.float64) - fpr_value, 0.0)


def score_quot(tpr_value, fpr_value, epsilon: float = DEFAULT_EPSILON):
    """Saturating rate quotient in [0, 1].

    The TPR/FPR ratio is clipped to [1, 4] and rescaled, so any word at least
    four times more frequent inside the cluster scores 1 regardless of its
    absolute rate.
    """
    ratio = np.asarray(tpr_value, dtype=np.float64) / np.maximum(fpr_value, epsilon)
    return (np.clip(ratio, 1.0, 4.0) - 1.0) / 3.0


def score_final(tpr_value, fpr_value, epsilon: float = DEFAULT_EPSILON):
    """Mean of the difference and quotient scores."""
    return 0.5 * (score_diff(tpr_value, fpr_value) + score_quot(tpr_value, fpr_value, epsilon))


def compute_relevance(index: OccurrenceIndex, epsilon: float = DEFAULT_EPSILON) -> RelevanceTable:
    """Score every (cluster, term) pair of an occurrence index."""
    n_clusters = len(index.clusters)
    rates = index.counts / index.sizes[:, None]
    fpr_raw = np.zeros_like(rates)
    if n_clusters == 1:
        warnings.warn("single cluster: FPR is 0 and scores reduce to occurrence rates")
    else:
        for c in range(n_clusters):
            others = rates[[l for l in range(n_clusters) if l != c]]
            fpr_raw[c] = others.mean(axis=0) + others.std(axis=0)
    r_diff = score_diff(rates, fpr_raw)
    r_quot = score_quot(rates, fpr_raw, epsilon)
    return RelevanceTable(
        terms=index.terms,
        clusters=index.clusters,
        tpr=rates,
        fpr=np.minimum(fpr_raw, 1.0),
        r_diff=r_diff,
        r_quot=r_quot,
        r=0.5 * (r_diff + r_quot),
    )


def rank_terms(table: RelevanceTable, cluster: ClusterKey, k: int) -> list[tuple[str, float]]:
    """Top-k terms for a cluster by score, descending.

    Ties break by higher TPR, then term order; zero-score terms never appear,
    so the list may be shorter than k.
    """
    c = table.cluster_position(cluster)
    scored = [
        (term, float(table.r[c, i]), float(table.tpr[c, i]))
        for i, term in enumerate(table.terms)
        if table.r[c, i] > 0.0
    ]
    scored.sort(key=lambda row: (-row[1], -row[2], row[0]))
    return [(term, score) for term, score, _ in scored[:k]]


def contrast_relevance(
    streams: Sequence[TokenStream],
    groups: Sequence[str | None],
    *,
    vocab: Vocabulary | None = None,
    epsilon: float = DEFAULT_EPSILON,
) -> RelevanceTable:
    """Relevance scores for a manual two-group split of the corpus.

    The two groups play the role of clusters, which surfaces the words that
    distinguish one period (or any hand-made partition) from the other.
    """
    missing = [s.doc_id for s, g in zip(streams, groups) if g is None]
    if missing:
        raise ValueError(f"documents without group labels: {', '.join(missing)}")
    distinct = sorted(set(groups))
    if len(distinct) != 2:
        raise ValueError(f"need exactly 2 non-empty groups, got {len(distinct)}: {distinct}")
    if vocab is None:
        vocab = build_vocabulary(list(streams), min_df=1)
    index = build_occurrence_index(streams, vocab, list(groups))
    return compute_relevance(index, epsilon=epsilon)


def write_relevance_csv(table: RelevanceTable, path) -> None:
    """Full table dump: ``cluster,term,tpr,fpr,r_diff,r_quot,r``.

    Rows sorted by cluster, then score descending (ties: TPR descending,
    term ascending) — the same order used for ranking.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("cluster,term,tpr,fpr,r_diff,r_quot,r\n")
        for c, cluster in enumerate(table.clusters):
            order = sorted(
                range(len(table.terms)),
                key=lambda i: (-table.r[c, i], -table.tpr[c, i], table.terms[i]),
            )
            for i in order:
                handle.write(
                    f"{cluster},{table.terms[i]},{table.tpr[c, i]:.12g},"
                    f"{table.fpr[c, i]:.12g},{table.r_diff[c, i]:.12g},"
                    f"{table.r_quot[c, i]:.12g},{table.r[c, i]:.12g}\n"
                )
