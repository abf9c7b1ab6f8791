"""Hierarchical-clustering baseline: average linkage over cosine distance.

Deliberately plain: unweighted mean phrase vectors, no NE grid, no staging.
The point of this module is the contrast with the staged pipeline, so none of
the engine's enhancements leak in here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import UniverseMismatchError, ZeroVectorError
from .model import Cluster


@dataclass(frozen=True)
class HCResult:
    """Flat clustering: groups of size >= 2 plus the NOT bucket."""

    clusters: tuple[frozenset[int], ...]
    unclustered: frozenset[int]

    def assignment(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for idx, members in enumerate(self.clusters):
            for rp_id in members:
                out[rp_id] = idx
        for offset, rp_id in enumerate(sorted(self.unclustered)):
            out[rp_id] = -(offset + 1)       # unique singleton labels
        return out


def hc_average_linkage(
    vectors: Mapping[int, np.ndarray], distance_thr: float
) -> HCResult:
    """Agglomerate while the smallest average cosine distance is <= distance_thr.

    Ties between merge candidates go to the pair with the smallest
    (min member id, max member id) over the two groups' smallest members.
    Singletons left at the cut form the unclustered bucket.
    """
    ids = sorted(vectors)
    if not ids:
        return HCResult(clusters=(), unclustered=frozenset())
    mat = np.stack([np.asarray(vectors[i], dtype=np.float64) for i in ids])
    norms = np.linalg.norm(mat, axis=1)
    if np.any(norms == 0):
        bad = [ids[i] for i in np.nonzero(norms == 0)[0]]
        raise ZeroVectorError(f"all-zero vectors for rp_ids {bad}")
    unit = mat / norms[:, None]
    dist = 1.0 - np.clip(unit @ unit.T, -1.0, 1.0)

    members: dict[int, list[int]] = {i: [ids[i]] for i in range(len(ids))}
    active = set(members)
    d = {(a, b): float(dist[a, b]) for a in members for b in members if a < b}

    while len(active) > 1:
        best_pair: tuple[int, int] | None = None
        best_d = math.inf
        best_key: tuple[int, int] | None = None
        for a in sorted(active):
            for b in sorted(active):
                if b <= a:
                    continue
                cur = d[(a, b)]
                rep = (min(members[a][0], members[b][0]),
                       max(members[a][0], members[b][0]))
                if cur < best_d or (cur == best_d and rep < best_key):
                    best_d = cur
                    best_pair = (a, b)
                    best_key = rep
        if best_pair is None or best_d > distance_thr:
            break
        a, b = best_pair
        size_a, size_b = len(members[a]), len(members[b])
        for c in active:
            if c in (a, b):
                continue
            key_a = (min(a, c), max(a, c))
            key_b = (min(b, c), max(b, c))
            d[key_a] = (size_a * d[key_a] + size_b * d[key_b]) / (size_a + size_b)
        members[a] = sorted(members[a] + members[b])
        active.remove(b)

    clusters = []
    unclustered = set()
    for slot in sorted(active, key=lambda s: members[s][0]):
        group = members[slot]
        if len(group) >= 2:
            clusters.append(frozenset(group))
        else:
            unclustered.add(group[0])
    return HCResult(clusters=tuple(clusters), unclustered=frozenset(unclustered))


@dataclass(frozen=True)
class ComparisonReport:
    """Side-by-side statistics for the staged pipeline vs the baseline."""

    universe_size: int
    ours_cluster_count: int
    baseline_cluster_count: int
    ours_unclustered: int
    baseline_unclustered: int
    ours_unclustered_fraction: float
    baseline_unclustered_fraction: float
    pair_agreement: float

    def to_dict(self) -> dict:
        return {
            "universe_size": self.universe_size,
            "ours_cluster_count": self.ours_cluster_count,
            "baseline_cluster_count": self.baseline_cluster_count,
            "ours_unclustered": self.ours_unclustered,
            "baseline_unclustered": self.baseline_unclustered,
            "ours_unclustered_fraction": self.ours_unclustered_fraction,
            "baseline_unclustered_fraction": self.baseline_unclustered_fraction,
            "pair_agreement": self.pair_agreement,
        }


def compare(
    ours: Sequence[Cluster],
    baseline: HCResult,
    universe: Sequence[int],
) -> ComparisonReport:
    """Cluster counts, unclustered fractions, and pairwise co-membership
    agreement (the fraction of RP pairs both partitions treat the same way)."""
    uni = sorted(set(universe))
    base_ids = set()
    for group in baseline.clusters:
        base_ids |= group
    base_ids |= baseline.unclustered
    if base_ids != set(uni):
        raise UniverseMismatchError(
            f"baseline covers {len(base_ids)} rp_ids, universe has {len(uni)}")
    ours_assign: dict[int, int] = {}
    for cluster in ours:
        for rp_id in cluster.members():
            if rp_id not in set(uni):
                raise UniverseMismatchError(f"rp_id {rp_id} outside the universe")
            ours_assign[rp_id] = cluster.cluster_id
    ours_unclustered = [i for i in uni if i not in ours_assign]
    for offset, rp_id in enumerate(ours_unclustered):
        ours_assign[rp_id] = -(offset + 1)
    base_assign = baseline.assignment()

    n = len(uni)
    ours_vec = np.array([ours_assign[i] for i in uni])
    base_vec = np.array([base_assign[i] for i in uni])
    same_ours = ours_vec[:, None] == ours_vec[None, :]
    same_base = base_vec[:, None] == base_vec[None, :]
    iu = np.triu_indices(n, k=1)
    total_pairs = len(iu[0])
    if total_pairs == 0:
        agreement = 1.0
    else:
        agreement = float((same_ours[iu] == same_base[iu]).sum() / total_pairs)
    return ComparisonReport(
        universe_size=n,
        ours_cluster_count=len(ours),
        baseline_cluster_count=len(baseline.clusters),
        ours_unclustered=len(ours_unclustered),
        baseline_unclustered=len(baseline.unclustered),
        ours_unclustered_fraction=(len(ours_unclustered) / n) if n else 0.0,
        baseline_unclustered_fraction=(len(baseline.unclustered) / n) if n else 0.0,
        pair_agreement=agreement,
    )
