"""Clustering stages 2-5: core chains, bodies, borders, non-core clusters.

Every stage reads the similarity bundle and never mutates it. All iteration
runs in ascending rp_id / cluster_id order so results are reproducible and
directly comparable against a brute-force reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Cluster, PipelineConfig, RepresentativePhrase
from .negrid import NEGrid
from .similarity import SimilarityBundle


@dataclass(frozen=True)
class RatioMatrix:
    """Neighborhood-overlap ratios between core RPs, thresholded at or_thr."""

    entries: np.ndarray            # square over core rows, same order as core_ids
    or_thr: float


def or_threshold(n_rp: int, cfg: PipelineConfig) -> float:
    """Corpus-size-dependent overlap threshold, clamped to [base, cap]."""
    if n_rp < 1:
        raise ValueError(f"need at least one RP, got {n_rp}")
    raw = math.log(n_rp) / math.log(cfg.or_thr_log_base)
    return min(max(raw, cfg.or_thr_base), cfg.or_thr_cap)


def ratio_matrix(core_sim: np.ndarray, or_thr: float) -> RatioMatrix:
    """Shared-neighbor fraction of binarized core similarity rows.

    For each core pair, the count of common positive neighbors is divided by
    the larger of the two row masses; entries below or_thr, the diagonal, and
    pairs of empty rows are zero.
    """
    b = (core_sim > 0).astype(np.float64)
    shared = b @ b.T
    masses = b.sum(axis=1)
    denom = np.maximum(masses[:, None], masses[None, :])
    frac = np.divide(shared, denom, out=np.zeros_like(shared), where=denom > 0)
    entries = np.where(frac >= or_thr, frac, 0.0)
    np.fill_diagonal(entries, 0.0)
    upper = np.triu(entries, k=1)
    return RatioMatrix(entries=upper + upper.T, or_thr=or_thr)


def collect_core_chains(
    rm: RatioMatrix, bundle: SimilarityBundle
) -> list[frozenset[int]]:
    """Connected components of the core-pair graph, size >= 2.

    Core RPs are linked when their overlap ratio survived the threshold,
    their pair similarity is positive, and their heads have positive
    similarity. Components come out ordered by smallest rp_id.
    """
    core_ids = bundle.core_ids
    rp_by_id = {rp.rp_id: rp for rp in bundle.rps}
    k = len(core_ids)
    adjacency: dict[int, set[int]] = {rp_id: set() for rp_id in core_ids}
    for a in range(k):
        for b in range(a + 1, k):
            if rm.entries[a, b] <= 0 or bundle.core_sim[a, b] <= 0:
                continue
            head_a = rp_by_id[core_ids[a]].head
            head_b = rp_by_id[core_ids[b]].head
            if bundle.head_value(head_a, head_b) <= 0:
                continue
            adjacency[core_ids[a]].add(core_ids[b])
            adjacency[core_ids[b]].add(core_ids[a])
    seen: set[int] = set()
    chains: list[frozenset[int]] = []
    for rp_id in core_ids:            # ascending, so components sort themselves
        if rp_id in seen or not adjacency[rp_id]:
            continue
        component = {rp_id}
        frontier = [rp_id]
        while frontier:
            cur = frontier.pop()
            for nxt in adjacency[cur]:
                if nxt not in component:
                    component.add(nxt)
                    frontier.append(nxt)
        seen |= component
        if len(component) >= 2:
            chains.append(frozenset(component))
    return chains


def _pair_allowed(
    rp_a: RepresentativePhrase, rp_b: RepresentativePhrase, grid: NEGrid
) -> bool:
    return grid.pair_weight(rp_a, rp_b).allowed


def form_bodies(
    cores: Sequence[frozenset[int]],
    bundle: SimilarityBundle,
    grid: NEGrid,
    cfg: PipelineConfig,
) -> list[set[int]]:
    """Body candidates per core: every unclustered RP joins each core where
    it clears body_thr against some member and the grid allows it against
    every member. Conflicting claims are resolved afterwards."""
    rp_by_id = {rp.rp_id: rp for rp in bundle.rps}
    clustered = set().union(*cores) if cores else set()
    sim = bundle.phrase_sim
    candidates: list[set[int]] = [set() for _ in cores]
    for rp in bundle.rps:
        if rp.rp_id in clustered:
            continue
        for ci, core in enumerate(cores):
            members = sorted(core)
            if not any(sim[rp.rp_id, m] >= cfg.body_thr for m in members):
                continue
            if all(_pair_allowed(rp, rp_by_id[m], grid) for m in members):
                candidates[ci].add(rp.rp_id)
    return candidates


def resolve_conflicts(
    cores: Sequence[frozenset[int]],
    candidates: Sequence[set[int]],
    bundle: SimilarityBundle,
) -> list[set[int]]:
    """Give each multiply-claimed RP to the best-scoring cluster.

    The score against a cluster averages, over its non-conflicting members
    (core plus uniquely claimed bodies), the shared-lemma count plus the pair
    similarity. Exact ties go to the lower cluster_id.
    """
    rp_by_id = {rp.rp_id: rp for rp in bundle.rps}
    sim = bundle.phrase_sim
    claims: dict[int, list[int]] = {}
    for ci, cand in enumerate(candidates):
        for rp_id in cand:
            claims.setdefault(rp_id, []).append(ci)
    conflicted = {rp_id for rp_id, cis in claims.items() if len(cis) > 1}
    bodies: list[set[int]] = [
        {rp_id for rp_id in cand if rp_id not in conflicted}
        for cand in candidates
    ]
    stable_members: list[list[int]] = [
        sorted(core | bodies[ci]) for ci, core in enumerate(cores)
    ]
    for rp_id in sorted(conflicted):
        rp = rp_by_id[rp_id]
        lemmas = rp.lemma_set()
        best_ci = -1
        best_score = -math.inf
        for ci in sorted(claims[rp_id]):
            members = stable_members[ci]
            overlap = sum(
                len(lemmas & rp_by_id[m].lemma_set()) for m in members)
            sim_mass = sum(float(sim[rp_id, m]) for m in members)
            score = (overlap + sim_mass) / len(members)
            if score > best_score:
                best_score = score
                best_ci = ci
        bodies[best_ci].add(rp_id)
    return bodies


def add_borders(
    cores: Sequence[frozenset[int]],
    bodies: Sequence[set[int]],
    bundle: SimilarityBundle,
    grid: NEGrid,
    cfg: PipelineConfig,
) -> list[set[int]]:
    """Attach loosely linked RPs to the cluster with the best mean link.

    A border member needs at least border_min_links positive similarities
    into one cluster's core+body and grid permission against all of its
    members; candidates join the cluster with the highest mean positive
    similarity, ties to the lower cluster_id. Membership is evaluated against
    the pre-border state, so border members never chain off each other.
    """
    rp_by_id = {rp.rp_id: rp for rp in bundle.rps}
    sim = bundle.phrase_sim
    cluster_members = [sorted(core | bodies[ci]) for ci, core in enumerate(cores)]
    clustered = set().union(*cluster_members) if cluster_members else set()
    borders: list[set[int]] = [set() for _ in cores]
    for rp in bundle.rps:
        if rp.rp_id in clustered:
            continue
        best_ci = -1
        best_mean = -math.inf
        for ci, members in enumerate(cluster_members):
            positive = [float(sim[rp.rp_id, m]) for m in members
                        if sim[rp.rp_id, m] > 0]
            if len(positive) < cfg.border_min_links:
                continue
            if not all(_pair_allowed(rp, rp_by_id[m], grid) for m in members):
                continue
            mean = sum(positive) / len(positive)
            if mean > best_mean:
                best_mean = mean
                best_ci = ci
        if best_ci >= 0:
            borders[best_ci].add(rp.rp_id)
    return borders


def form_noncore(
    unclustered: set[int],
    bundle: SimilarityBundle,
    cfg: PipelineConfig,
) -> list[set[int]]:
    """Greedy density-first grouping of everything still unclustered.

    Seeds are visited in descending unclustered-neighbor count (ties by
    rp_id, degrees fixed at stage start); each seed absorbs its not-yet-taken
    neighbors at noncore_thr, and only groups of two or more survive.
    """
    sim = bundle.phrase_sim
    ids = sorted(unclustered)
    neighbors: dict[int, list[int]] = {
        i: [j for j in ids if j != i and sim[i, j] >= cfg.noncore_thr]
        for i in ids
    }
    order = sorted(ids, key=lambda i: (-len(neighbors[i]), i))
    taken: set[int] = set()
    clusters: list[set[int]] = []
    for seed in order:
        if seed in taken:
            continue
        members = {seed} | {j for j in neighbors[seed] if j not in taken}
        if len(members) >= 2:
            clusters.append(members)
            taken |= members
    return clusters


@dataclass(frozen=True)
class StageOutputs:
    """Everything stages 2-5 decided, before the final merge."""

    or_thr: float
    ratio: RatioMatrix
    cores: tuple[frozenset[int], ...]
    bodies: tuple[frozenset[int], ...]
    borders: tuple[frozenset[int], ...]
    noncore: tuple[frozenset[int], ...]
    clusters: tuple[Cluster, ...]


def run_stages(
    bundle: SimilarityBundle, grid: NEGrid, cfg: PipelineConfig
) -> StageOutputs:
    """Stages 2-5 in order; cluster ids number staged then non-core clusters."""
    n_rp = len(bundle.rps)
    or_thr = or_threshold(n_rp, cfg) if n_rp else cfg.or_thr_base
    rm = ratio_matrix(bundle.core_sim, or_thr)
    cores = collect_core_chains(rm, bundle)
    candidates = form_bodies(cores, bundle, grid, cfg)
    bodies = resolve_conflicts(cores, candidates, bundle)
    borders = add_borders(cores, bodies, bundle, grid, cfg)
    clustered = set()
    for ci in range(len(cores)):
        clustered |= cores[ci] | bodies[ci] | borders[ci]
    unclustered = {rp.rp_id for rp in bundle.rps} - clustered
    noncore = form_noncore(unclustered, bundle, cfg)
    clusters: list[Cluster] = []
    for ci, core in enumerate(cores):
        clusters.append(Cluster(
            cluster_id=ci,
            core_members=frozenset(core),
            body_members=frozenset(bodies[ci]),
            border_members=frozenset(borders[ci]),
            kind="staged",
        ))
    for offset, members in enumerate(noncore):
        clusters.append(Cluster(
            cluster_id=len(cores) + offset,
            core_members=frozenset(),
            body_members=frozenset(members),
            border_members=frozenset(),
            kind="noncore",
        ))
    return StageOutputs(
        or_thr=or_thr,
        ratio=rm,
        cores=tuple(frozenset(c) for c in cores),
        bodies=tuple(frozenset(b) for b in bodies),
        borders=tuple(frozenset(b) for b in borders),
        noncore=tuple(frozenset(m) for m in noncore),
        clusters=tuple(clusters),
    )
