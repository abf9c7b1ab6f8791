"""Shared test helpers: dict-to-engine conversion and oracle comparison."""

from __future__ import annotations

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from actor_concepts.ingest import EmbeddingStore, NERelation
from actor_concepts.model import Component, Mention, PipelineConfig, RepresentativePhrase
from actor_concepts.negrid import NEGrid
from actor_concepts.pipeline import execute
from actor_concepts.similarity import SimilarityBundle

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "fixtures")


def store_from_dict(table: dict) -> EmbeddingStore:
    arrays = {k: np.asarray(v, dtype=np.float64) for k, v in table.items()}
    dim = len(next(iter(arrays.values())))
    max_key_tokens = max((k.count("_") + 1 for k in arrays), default=1)
    return EmbeddingStore(dim=dim, table=arrays, max_key_tokens=max_key_tokens)


def engine_inputs(fixture: dict):
    mentions = [Mention.from_dict(m) for m in fixture["mentions"]]
    store = store_from_dict(fixture["table"])
    relations = [NERelation(a=a, b=b, chain_type=t)
                 for a, b, t in fixture["relations"]]
    cfg = PipelineConfig.from_dict(fixture["config"])
    return mentions, store, relations, cfg


def run_engine(fixture: dict, threads: int = 1):
    mentions, store, relations, cfg = engine_inputs(fixture)
    return execute(mentions, store, relations, cfg, threads=threads)


def fixture_path(name: str, filename: str) -> str:
    return os.path.join(FIXTURE_DIR, name, filename)


def make_rp(
    rp_id: int,
    rp_text: str,
    *,
    head: str | None = None,
    ne: str | None = None,
    is_core: bool = True,
    components: list[tuple[str, str]] | None = None,
    n_mentions: int = 1,
) -> RepresentativePhrase:
    """Hand-built RP; components default to head + compound modifiers."""
    tokens = rp_text.split()
    head = head if head is not None else tokens[-1]
    if components is None:
        components = [(t.lower(), "compound") for t in tokens[:-1]]
        components.append((head.lower(), "head"))
    return RepresentativePhrase(
        rp_id=rp_id,
        rp_text=rp_text,
        head=head,
        components=tuple(Component(lemma=l, role=r) for l, r in components),
        ne=ne,
        ne_components=(),
        member_mention_ids=tuple(f"m{rp_id}_{k}" for k in range(n_mentions)),
        is_core=is_core,
    )


def bundle_from_matrix(rps, sim) -> SimilarityBundle:
    """Bundle with a given phrase_sim and no head matrix.

    All-equal heads read as 0.5 via head_value; distinct heads read as 0.
    """
    s = np.asarray(sim, dtype=np.float64)
    rps = tuple(sorted(rps, key=lambda rp: rp.rp_id))
    core_ids = tuple(rp.rp_id for rp in rps if rp.is_core)
    return SimilarityBundle(
        rps=rps,
        phrase_sim=s,
        core_ids=core_ids,
        core_sim=s[np.ix_(core_ids, core_ids)].copy(),
        heads=(),
        head_sim=np.zeros((0, 0), dtype=np.float64),
        head_index={},
        plain_vectors=np.zeros((len(rps), 1), dtype=np.float64),
        excluded=(),
        missing_heads=(),
    )


EMPTY_GRID = NEGrid(chains=(), wt=1.7)


def assert_matches_reference(result, ref, tol: float = 1e-9) -> None:
    """Engine output must agree with the brute-force reference stage by stage."""
    # Phrase set and ids
    assert [rp.rp_text for rp in result.rps] == [r["rp_text"] for r in ref.rps]
    assert [rp.rp_id for rp in result.rps] == [r["rp_id"] for r in ref.rps]
    assert [rp.ne for rp in result.rps] == [r["ne"] for r in ref.rps]
    assert [rp.is_core for rp in result.rps] == [r["is_core"] for r in ref.rps]

    # Chains
    engine_chains = sorted(
        (c.chain_type, frozenset(c.members)) for c in result.grid.chains)
    assert engine_chains == sorted(ref.chains)

    assert sorted(result.bundle.excluded) == sorted(ref.excluded_rp_ids)

    # Pair similarities: same support, same values
    n = len(result.rps)
    for i in range(n):
        for j in range(n):
            engine_v = float(result.bundle.phrase_sim[i, j])
            ref_v = ref.phrase_sim[(i, j)]
            assert (engine_v > 0) == (ref_v > 0), (i, j, engine_v, ref_v)
            assert abs(engine_v - ref_v) < tol, (i, j, engine_v, ref_v)

    # Ratio matrix over core ids
    assert list(result.bundle.core_ids) == ref.core_ids
    core_ids = ref.core_ids
    for a, i in enumerate(core_ids):
        for b, j in enumerate(core_ids):
            engine_v = float(result.stages.ratio.entries[a, b])
            ref_v = ref.ratio[(i, j)]
            assert (engine_v > 0) == (ref_v > 0), (i, j, engine_v, ref_v)
            assert abs(engine_v - ref_v) < tol, (i, j, engine_v, ref_v)
    assert abs(result.stages.or_thr - ref.or_thr) < tol

    # Stage memberships
    assert [set(c) for c in result.stages.cores] == [set(c) for c in ref.cores]
    assert [set(b) for b in result.stages.bodies] == [set(b) for b in ref.bodies]
    assert ([set(b) for b in result.stages.borders]
            == [set(b) for b in ref.borders])
    assert ([set(m) for m in result.stages.noncore]
            == [set(m) for m in ref.noncore])

    # Final clusters
    engine_final = [
        (c.cluster_id, set(c.core_members), set(c.body_members),
         set(c.border_members), c.kind, tuple(c.merged_from))
        for c in result.final_clusters
    ]
    ref_final = [
        (c["id"], set(c["core"]), set(c["body"]), set(c["border"]),
         c["kind"], tuple(c["merged_from"]))
        for c in ref.final
    ]
    assert engine_final == ref_final
    assert sorted(result.merge.excluded_cluster_ids) == sorted(ref.merge_excluded)
