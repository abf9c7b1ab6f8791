"""Final stage: merge clusters whose TF-IDF lemma vectors nearly coincide.

Clusters act as documents over their members' lowercased component lemmas
(extended role set, including number and apposition modifiers). Merging joins
connected components of the cross-similarity relation, which is gated both by
a cosine threshold and by the NE grid over chain-member lemmas.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import UnembeddableClusterError, ZeroVectorError
from .ingest import EmbeddingStore
from .model import Cluster, PipelineConfig, RepresentativePhrase
from .negrid import NEGrid
from .similarity import cosine

logger = logging.getLogger("actor_concepts.merge")


@dataclass(frozen=True)
class ClusterLemmaBag:
    """Lemma occurrence counts for one cluster's member RPs."""

    cluster_id: int
    counts: dict[str, int]

    def total(self) -> int:
        return sum(self.counts.values())


def cluster_lemma_bag(
    cluster: Cluster, rps: Sequence[RepresentativePhrase]
) -> ClusterLemmaBag:
    """Count lowercased head and modifier lemmas over all member RPs."""
    rp_by_id = {rp.rp_id: rp for rp in rps}
    counts: dict[str, int] = {}
    for rp_id in sorted(cluster.members()):
        for lemma in sorted(rp_by_id[rp_id].lemma_set(extended=True)):
            counts[lemma] = counts.get(lemma, 0) + 1
    return ClusterLemmaBag(cluster_id=cluster.cluster_id, counts=counts)


def tfidf_weights(
    bags: Sequence[ClusterLemmaBag],
) -> dict[tuple[int, str], float]:
    """Smoothed TF-IDF per (cluster, lemma).

    tf divides the count by the bag total; idf = ln((1+N)/(1+df)) + 1, which
    stays positive even for lemmas present in every bag.
    """
    n_bags = len(bags)
    df: dict[str, int] = {}
    for bag in bags:
        for lemma in bag.counts:
            df[lemma] = df.get(lemma, 0) + 1
    weights: dict[tuple[int, str], float] = {}
    for bag in bags:
        total = bag.total()
        for lemma, count in bag.counts.items():
            tf = count / total
            idf = math.log((1 + n_bags) / (1 + df[lemma])) + 1.0
            weights[(bag.cluster_id, lemma)] = tf * idf
    return weights


def cluster_vector(
    bag: ClusterLemmaBag,
    weights: Mapping[tuple[int, str], float],
    store: EmbeddingStore,
) -> np.ndarray:
    """TF-IDF-weighted mean over the bag's resolvable lemma vectors."""
    resolvable = sorted(l for l in bag.counts if l in store)
    if not resolvable:
        raise UnembeddableClusterError(
            f"cluster {bag.cluster_id}: no lemma resolves to a vector")
    total = np.zeros(store.dim, dtype=np.float64)
    for lemma in resolvable:
        total += weights[(bag.cluster_id, lemma)] * store.table[lemma]
    return total / len(resolvable)


@dataclass(frozen=True)
class MergeResult:
    clusters: tuple[Cluster, ...]
    excluded_cluster_ids: tuple[int, ...]   # skipped: no embeddable lemma


def merge_clusters(
    clusters: Sequence[Cluster],
    bags: Sequence[ClusterLemmaBag],
    store: EmbeddingStore,
    grid: NEGrid,
    cfg: PipelineConfig,
) -> MergeResult:
    """Merge connected components of the cluster cross-similarity relation.

    Two clusters link when their vectors' cosine clears merge_thr and every
    pair of chain-member lemmas across them is grid-allowed. The merged
    cluster keeps the smallest predecessor id and each member's stage label.
    """
    bag_by_id = {bag.cluster_id: bag for bag in bags}
    weights = tfidf_weights(list(bags))
    vectors: dict[int, np.ndarray] = {}
    excluded: list[int] = []
    for cluster in clusters:
        try:
            vectors[cluster.cluster_id] = cluster_vector(
                bag_by_id[cluster.cluster_id], weights, store)
        except UnembeddableClusterError:
            excluded.append(cluster.cluster_id)
            logger.warning("cluster %d has no embeddable lemma; left unmerged",
                           cluster.cluster_id)
    chain_lemmas: dict[int, list[str]] = {}
    for cluster in clusters:
        bag = bag_by_id[cluster.cluster_id]
        chain_lemmas[cluster.cluster_id] = sorted(
            l for l in bag.counts if grid.in_grid(l))

    ids = sorted(c.cluster_id for c in clusters)
    parent = {i: i for i in ids}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for pos, a in enumerate(ids):
        if a not in vectors:
            continue
        for b in ids[pos + 1:]:
            if b not in vectors:
                continue
            try:
                sim = cosine(vectors[a], vectors[b])
            except ZeroVectorError:
                continue
            if sim < cfg.merge_thr:
                continue
            if any(grid.grid_weight(la, lb) == 0.0
                   for la in chain_lemmas[a] for lb in chain_lemmas[b]):
                continue
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

    groups: dict[int, list[Cluster]] = {}
    for cluster in clusters:
        groups.setdefault(find(cluster.cluster_id), []).append(cluster)
    final: list[Cluster] = []
    for root in sorted(groups):
        members = sorted(groups[root], key=lambda c: c.cluster_id)
        if len(members) == 1:
            final.append(members[0])
            continue
        core = frozenset().union(*(c.core_members for c in members))
        body = frozenset().union(*(c.body_members for c in members))
        border = frozenset().union(*(c.border_members for c in members))
        final.append(Cluster(
            cluster_id=members[0].cluster_id,
            core_members=core,
            body_members=body,
            border_members=border,
            kind="staged" if core else "noncore",
            merged_from=tuple(c.cluster_id for c in members),
        ))
    final.sort(key=lambda c: c.cluster_id)
    return MergeResult(clusters=tuple(final),
                       excluded_cluster_ids=tuple(excluded))
