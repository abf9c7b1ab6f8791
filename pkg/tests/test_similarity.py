"""Phrase vectors, the pairwise matrix rules, and their invariants."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from actor_concepts.errors import UnembeddableError, ZeroVectorError
from actor_concepts.ingest import NERelation, derive_rps
from actor_concepts.model import PipelineConfig
from actor_concepts.negrid import NEGrid, build_chains
from actor_concepts.similarity import build_bundle, cosine, weighted_phrase_vector
from conftest import EMPTY_GRID, engine_inputs, make_rp, run_engine, store_from_dict
from fixture_gen import make_fixture

CFG = PipelineConfig(embedding_dim=3)


def grid_from(*relations):
    rels = [NERelation(a=a, b=b, chain_type=t) for a, b, t in relations]
    return NEGrid(chains=tuple(build_chains(rels)), wt=1.7)


class TestCosine:
    def test_closed_form_half_sqrt2(self):
        assert cosine([1.0, 0.0], [1.0, 1.0]) == pytest.approx(
            1.0 / math.sqrt(2.0), abs=1e-9)
        assert cosine([1.0, 0.0], [1.0, 1.0]) == pytest.approx(0.70711, abs=5e-6)

    def test_orthogonal(self):
        assert cosine([1.0, 0.0], [0.0, 2.0]) == 0.0

    def test_opposite_clamped(self):
        assert cosine([1.0, 0.0], [-3.0, 0.0]) == -1.0

    def test_zero_vector_raises(self):
        with pytest.raises(ZeroVectorError):
            cosine([0.0, 0.0], [1.0, 0.0])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            cosine([1.0], [1.0, 0.0])

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-5, 5), min_size=3, max_size=3),
           st.lists(st.floats(-5, 5), min_size=3, max_size=3))
    def test_symmetric_and_bounded(self, u, v):
        # Tiny norms can square-underflow to zero; those raise by contract.
        if np.linalg.norm(u) < 1e-9 or np.linalg.norm(v) < 1e-9:
            return
        a = cosine(u, v)
        assert -1.0 <= a <= 1.0
        assert a == cosine(v, u)


class TestWeightedPhraseVector:
    STORE = store_from_dict({
        "aland": [1.0, 0.0, 0.0],
        "officials": [0.0, 1.0, 0.0],
    })

    def test_single_token_weight_one(self):
        rp = make_rp(0, "officials")
        got = weighted_phrase_vector(rp, [1.0], self.STORE)
        np.testing.assert_array_equal(got, [0.0, 1.0, 0.0])

    def test_boost_divides_by_token_count(self):
        rp = make_rp(0, "aland officials")
        got = weighted_phrase_vector(rp, [1.7, 1.0], self.STORE)
        np.testing.assert_allclose(got, [0.85, 0.5, 0.0], atol=1e-12)

    def test_weight_arity_checked(self):
        rp = make_rp(0, "aland officials")
        with pytest.raises(ValueError, match="weights"):
            weighted_phrase_vector(rp, [1.0], self.STORE)

    def test_unembeddable_raises(self):
        rp = make_rp(0, "zork blork")
        with pytest.raises(UnembeddableError):
            weighted_phrase_vector(rp, [1.0, 1.0], self.STORE)


class TestPhraseMatrix:
    def test_floor_cuts_at_point_four(self):
        s39 = [0.39, math.sqrt(1 - 0.39 ** 2), 0.0]
        s45 = [0.45, math.sqrt(1 - 0.45 ** 2), 0.0]
        store = store_from_dict(
            {"alpha": [1.0, 0.0, 0.0], "beta": s39, "gamma": s45})
        rps = [make_rp(0, "alpha"), make_rp(1, "beta"), make_rp(2, "gamma")]
        bundle = build_bundle(rps, store, EMPTY_GRID, CFG)
        # cos(alpha, beta) = 0.39 dips under the floor; 0.45 survives.
        assert bundle.phrase_sim[0, 1] == 0.0
        assert bundle.phrase_sim[0, 2] == pytest.approx(0.45, abs=1e-12)

    def test_same_chain_boost_raises_similarity(self):
        store = store_from_dict({
            "Aland": [1.0, 0.0, 0.0],
            "officials": [0.0, 1.0, 0.0],
            "people": [0.0, 0.0, 1.0],
        })
        grid = grid_from(("Aland", "Alandic", "cn"))
        rps = [
            make_rp(0, "Aland officials", ne="Aland"),
            make_rp(1, "Aland people", ne="Aland"),
        ]
        bundle = build_bundle(rps, store, grid, CFG)
        # Hand evaluation: both sides become (1.7*ne + other)/2.
        u = np.array([0.85, 0.5, 0.0])
        v = np.array([0.85, 0.0, 0.5])
        expected = float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))
        plain = 0.5  # unweighted means share only the NE token
        assert bundle.phrase_sim[0, 1] == pytest.approx(expected, abs=1e-12)
        assert bundle.phrase_sim[0, 1] > plain

    def test_solo_in_grid_ne_boosts_one_side(self):
        store = store_from_dict({
            "Aland": [1.0, 0.0, 0.0],
            "officials": [0.0, 1.0, 0.0],
            "workers": [0.0, 1.0, 0.0],
        })
        grid = grid_from(("Aland", "Alandic", "cn"))
        rps = [
            make_rp(0, "Aland officials", ne="Aland"),
            make_rp(1, "the workers", ne=None),
        ]
        bundle = build_bundle(rps, store, grid, CFG)
        u = np.array([0.85, 0.5, 0.0])     # boosted side
        v = np.array([0.0, 1.0, 0.0])      # plain side: only "workers" resolves
        expected = float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))
        assert bundle.phrase_sim[0, 1] == pytest.approx(expected, abs=1e-12)

    def test_blocked_pair_zeroed_despite_high_cosine(self):
        store = store_from_dict({
            "Aland": [1.0, 0.0, 0.0],
            "Bland": [0.9, 0.1, 0.0],
            "officials": [0.0, 1.0, 0.0],
        })
        grid = grid_from(("Aland", "Alandic", "cn"),
                         ("Bland", "Blandic", "cn"))
        rps = [
            make_rp(0, "Aland officials", ne="Aland"),
            make_rp(1, "Bland officials", ne="Bland"),
        ]
        bundle = build_bundle(rps, store, grid, CFG)
        unweighted = cosine([0.5, 0.5, 0.0], [0.45, 0.55, 0.0])
        assert unweighted > CFG.thr_sim_rp
        assert bundle.phrase_sim[0, 1] == 0.0

    def test_unembeddable_rp_zeroed_and_listed(self):
        store = store_from_dict({
            "alpha": [1.0, 0.0, 0.0], "beta": [1.0, 0.1, 0.0]})
        rps = [make_rp(0, "alpha"), make_rp(1, "beta"), make_rp(2, "zork")]
        bundle = build_bundle(rps, store, EMPTY_GRID, CFG)
        assert bundle.excluded == (2,)
        assert not bundle.phrase_sim[2].any()
        assert not bundle.phrase_sim[:, 2].any()
        assert bundle.phrase_sim[0, 1] > 0

    def test_diagonal_zero_and_exact_symmetry(self):
        fx = make_fixture(5)
        result = run_engine(fx)
        s = result.bundle.phrase_sim
        assert not np.diagonal(s).any()
        assert (s == s.T).all()
        assert float(s.min()) >= 0.0 and float(s.max()) <= 1.0
        # Kept entries respect the floor.
        kept = s[s > 0]
        assert kept.size == 0 or float(kept.min()) >= CFG.thr_sim_rp

    def test_core_matrix_is_a_restriction(self):
        fx = make_fixture(6)
        result = run_engine(fx)
        ids = list(result.bundle.core_ids)
        np.testing.assert_array_equal(
            result.bundle.core_sim,
            result.bundle.phrase_sim[np.ix_(ids, ids)])

    def test_thread_count_does_not_change_bits(self):
        fx = make_fixture(7)
        mentions, store, relations, cfg = engine_inputs(fx)
        rps = derive_rps(mentions)
        grid = NEGrid(chains=tuple(build_chains(relations)), wt=cfg.wt)
        one = build_bundle(rps, store, grid, cfg, threads=1)
        eight = build_bundle(rps, store, grid, cfg, threads=8)
        assert one.phrase_sim.tobytes() == eight.phrase_sim.tobytes()
        assert one.head_sim.tobytes() == eight.head_sim.tobytes()

    def test_sparse_ids_rejected(self):
        store = store_from_dict({"alpha": [1.0, 0.0, 0.0]})
        with pytest.raises(ValueError, match="dense"):
            build_bundle([make_rp(1, "alpha")], store, EMPTY_GRID, CFG)


class TestHeadMatrix:
    def test_equal_heads_pin_at_half(self):
        store = store_from_dict({
            "alpha": [1.0, 0.0, 0.0], "officials": [0.0, 1.0, 0.0]})
        rps = [make_rp(0, "alpha officials"), make_rp(1, "officials")]
        bundle = build_bundle(rps, store, EMPTY_GRID, CFG)
        assert bundle.head_value("officials", "officials") == 0.5

    def test_distinct_heads_use_cosine(self):
        s39 = [0.39, math.sqrt(1 - 0.39 ** 2), 0.0]
        store = store_from_dict({"alpha": [1.0, 0.0, 0.0], "beta": s39})
        rps = [make_rp(0, "alpha"), make_rp(1, "beta")]
        bundle = build_bundle(rps, store, EMPTY_GRID, CFG)
        # No floor on head values: 0.39 stays.
        assert bundle.head_value("alpha", "beta") == pytest.approx(0.39, abs=1e-12)

    def test_missing_head_reads_zero(self):
        store = store_from_dict({"alpha": [1.0, 0.0, 0.0]})
        rps = [make_rp(0, "alpha"), make_rp(1, "zork")]
        bundle = build_bundle(rps, store, EMPTY_GRID, CFG)
        assert "zork" in bundle.missing_heads
        assert bundle.head_value("alpha", "zork") == 0.0
        # Equal-head pinning still applies to unembeddable heads.
        assert bundle.head_value("zork", "zork") == 0.5
