"""Stage semantics: overlap threshold, core chains, bodies, borders, noncore."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from actor_concepts.ingest import NERelation
from actor_concepts.model import PipelineConfig
from actor_concepts.negrid import NEGrid, build_chains
from actor_concepts.staged import (
    RatioMatrix,
    add_borders,
    collect_core_chains,
    form_bodies,
    form_noncore,
    or_threshold,
    ratio_matrix,
    resolve_conflicts,
    run_stages,
)
from conftest import EMPTY_GRID, bundle_from_matrix, make_rp, run_engine
from fixture_gen import make_fixture

CFG = PipelineConfig(embedding_dim=8)


def sym(n, entries):
    s = np.zeros((n, n), dtype=np.float64)
    for i, j, v in entries:
        s[i, j] = s[j, i] = v
    return s


class TestOrThreshold:
    def test_small_corpus_clamps_to_base(self):
        # ln(70)/ln(5000) = 0.4988..., under the 0.5 floor.
        assert or_threshold(70, CFG) == 0.5

    def test_mid_corpus_formula(self):
        assert or_threshold(200, CFG) == pytest.approx(0.6221, abs=1e-4)
        assert or_threshold(200, CFG) == pytest.approx(
            math.log(200) / math.log(5000), abs=1e-12)

    def test_large_corpus_clamps_to_cap(self):
        assert or_threshold(5000, CFG) == 0.7
        assert or_threshold(100000, CFG) == 0.7

    def test_single_rp(self):
        assert or_threshold(1, CFG) == 0.5

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            or_threshold(0, CFG)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 10 ** 6), st.integers(1, 10 ** 6))
    def test_monotone_in_corpus_size(self, a, b):
        lo, hi = sorted((a, b))
        assert or_threshold(lo, CFG) <= or_threshold(hi, CFG)
        assert 0.5 <= or_threshold(a, CFG) <= 0.7


class TestRatioMatrix:
    def test_shared_neighbor_fraction(self):
        # Row 0 borders {2,3,4}; row 1 borders {3,4,5}: 2 shared of max 3.
        s = sym(6, [(0, 2, 0.6), (0, 3, 0.6), (0, 4, 0.6),
                    (1, 3, 0.6), (1, 4, 0.6), (1, 5, 0.6)])
        rm = ratio_matrix(s, or_thr=0.6)
        assert rm.entries[0, 1] == pytest.approx(2 / 3, abs=1e-12)
        assert rm.entries[1, 0] == rm.entries[0, 1]

    def test_threshold_drops_fraction(self):
        s = sym(6, [(0, 2, 0.6), (0, 3, 0.6), (0, 4, 0.6),
                    (1, 3, 0.6), (1, 4, 0.6), (1, 5, 0.6)])
        rm = ratio_matrix(s, or_thr=0.7)
        assert rm.entries[0, 1] == 0.0

    def test_disjoint_rows(self):
        s = sym(4, [(0, 2, 0.6), (1, 3, 0.6)])
        rm = ratio_matrix(s, or_thr=0.0)
        assert rm.entries[0, 1] == 0.0

    def test_isolated_rows_stay_zero(self):
        rm = ratio_matrix(np.zeros((3, 3)), or_thr=0.5)
        assert not rm.entries.any()

    def test_diagonal_zero(self):
        s = sym(3, [(0, 1, 0.6), (0, 2, 0.6), (1, 2, 0.6)])
        rm = ratio_matrix(s, or_thr=0.0)
        assert not np.diagonal(rm.entries).any()

    def test_denominator_uses_larger_mass(self):
        # Row 0 borders {1,2,3,4}; row 5 borders {1,2}: 2 shared of max 4.
        s = sym(6, [(0, 1, 0.6), (0, 2, 0.6), (0, 3, 0.6), (0, 4, 0.6),
                    (5, 1, 0.6), (5, 2, 0.6)])
        rm = ratio_matrix(s, or_thr=0.0)
        # Masses include every positive entry, so row 0 also counts 5's edges
        # back to 1 and 2. Recompute by hand: row0 = {1,2,3,4}, row5 = {1,2}
        # -> shared {1,2}, denominator max(4, 2) = 4.
        assert rm.entries[0, 5] == pytest.approx(0.5, abs=1e-12)


def core_bundle(n, sim_entries, rm_entries, or_thr=0.5, head=None):
    rps = [make_rp(i, f"rp{i} members", head=head or "members") for i in range(n)]
    s = sym(n, sim_entries)
    bundle = bundle_from_matrix(rps, s)
    rm = RatioMatrix(entries=sym(n, rm_entries), or_thr=or_thr)
    return bundle, rm


class TestCoreChains:
    def test_no_edges_no_cores(self):
        bundle, rm = core_bundle(3, [], [])
        assert collect_core_chains(rm, bundle) == []

    def test_two_components(self):
        edges = [(0, 1, 0.6), (1, 2, 0.6), (3, 4, 0.6)]
        bundle, rm = core_bundle(5, edges, [(i, j, 0.8) for i, j, _ in edges])
        got = collect_core_chains(rm, bundle)
        assert got == [frozenset({0, 1, 2}), frozenset({3, 4})]

    def test_fully_connected_four(self):
        edges = [(i, j, 0.6) for i in range(4) for j in range(i + 1, 4)]
        bundle, rm = core_bundle(4, edges, [(i, j, 0.8) for i, j, _ in edges])
        assert collect_core_chains(rm, bundle) == [frozenset({0, 1, 2, 3})]

    def test_needs_positive_similarity(self):
        # Ratio alone is not enough; the pair similarity gate stays on.
        bundle, rm = core_bundle(2, [], [(0, 1, 0.8)])
        assert collect_core_chains(rm, bundle) == []

    def test_needs_positive_head_similarity(self):
        rps = [make_rp(0, "alpha crowd", head="crowd"),
               make_rp(1, "beta herd", head="herd")]
        s = sym(2, [(0, 1, 0.6)])
        bundle = bundle_from_matrix(rps, s)   # empty head index: value 0
        rm = RatioMatrix(entries=sym(2, [(0, 1, 0.8)]), or_thr=0.5)
        assert collect_core_chains(rm, bundle) == []

    def test_only_core_rows_participate(self):
        rps = [make_rp(0, "a members"), make_rp(1, "b members"),
               make_rp(2, "c members", is_core=False)]
        s = sym(3, [(0, 1, 0.6), (0, 2, 0.9), (1, 2, 0.9)])
        bundle = bundle_from_matrix(rps, s)
        rm = RatioMatrix(entries=sym(2, [(0, 1, 0.9)]), or_thr=0.5)
        got = collect_core_chains(rm, bundle)
        assert got == [frozenset({0, 1})]


class TestBodies:
    def test_below_threshold_not_attached(self):
        rps = [make_rp(i, f"rp{i} members") for i in range(3)]
        s = sym(3, [(0, 1, 0.6), (2, 0, 0.45), (2, 1, 0.45)])
        bundle = bundle_from_matrix(rps, s)
        got = form_bodies([frozenset({0, 1})], bundle, EMPTY_GRID, CFG)
        assert got == [set()]

    def test_single_strong_link_suffices(self):
        rps = [make_rp(i, f"rp{i} members") for i in range(3)]
        s = sym(3, [(0, 1, 0.6), (2, 0, 0.55)])
        bundle = bundle_from_matrix(rps, s)
        got = form_bodies([frozenset({0, 1})], bundle, EMPTY_GRID, CFG)
        assert got == [{2}]

    def test_grid_block_against_one_member_vetoes(self):
        grid = NEGrid(chains=tuple(build_chains([
            NERelation("Aland", "Alandic", "cn"),
            NERelation("Bland", "Blandic", "cn"),
        ])), wt=1.7)
        rps = [
            make_rp(0, "Aland members", ne="Aland"),
            make_rp(1, "plain members", ne=None),
            make_rp(2, "Bland members", ne="Bland"),
        ]
        s = sym(3, [(0, 1, 0.6), (2, 1, 0.9)])
        bundle = bundle_from_matrix(rps, s)
        got = form_bodies([frozenset({0, 1})], bundle, grid, CFG)
        assert got == [set()]

    def test_core_members_never_become_bodies(self):
        rps = [make_rp(i, f"rp{i} members") for i in range(4)]
        s = sym(4, [(0, 1, 0.6), (2, 3, 0.6), (0, 2, 0.9)])
        bundle = bundle_from_matrix(rps, s)
        got = form_bodies([frozenset({0, 1}), frozenset({2, 3})],
                          bundle, EMPTY_GRID, CFG)
        assert got == [set(), set()]


class TestConflicts:
    def test_lemma_overlap_breaks_sim_tie(self):
        rps = [
            make_rp(0, "iran leaders"),
            make_rp(1, "regime aides"),
            make_rp(2, "union pilots"),
            make_rp(3, "guild dancers"),
            make_rp(4, "iran regime"),
        ]
        s = sym(5, [(0, 1, 0.6), (2, 3, 0.6),
                    (4, 0, 0.55), (4, 1, 0.55), (4, 2, 0.55), (4, 3, 0.55)])
        bundle = bundle_from_matrix(rps, s)
        cores = [frozenset({0, 1}), frozenset({2, 3})]
        candidates = form_bodies(cores, bundle, EMPTY_GRID, CFG)
        assert candidates == [{4}, {4}]
        bodies = resolve_conflicts(cores, candidates, bundle)
        assert bodies == [{4}, set()]

    def test_similarity_mass_decides_without_overlap(self):
        rps = [
            make_rp(0, "ember dancers"),
            make_rp(1, "umbra dancers"),
            make_rp(2, "vortex dancers"),
            make_rp(3, "willow dancers"),
            make_rp(4, "zephyr dancers"),
        ]
        s = sym(5, [(0, 1, 0.6), (2, 3, 0.6),
                    (4, 0, 0.52), (4, 1, 0.52), (4, 2, 0.58), (4, 3, 0.58)])
        bundle = bundle_from_matrix(rps, s)
        cores = [frozenset({0, 1}), frozenset({2, 3})]
        bodies = resolve_conflicts(
            cores, form_bodies(cores, bundle, EMPTY_GRID, CFG), bundle)
        assert bodies == [set(), {4}]

    def test_exact_tie_prefers_lower_cluster_id(self):
        rps = [make_rp(i, f"rp{i} dancers") for i in range(5)]
        s = sym(5, [(0, 1, 0.6), (2, 3, 0.6),
                    (4, 0, 0.55), (4, 1, 0.55), (4, 2, 0.55), (4, 3, 0.55)])
        bundle = bundle_from_matrix(rps, s)
        cores = [frozenset({0, 1}), frozenset({2, 3})]
        bodies = resolve_conflicts(
            cores, form_bodies(cores, bundle, EMPTY_GRID, CFG), bundle)
        assert bodies == [{4}, set()]

    def test_unconflicted_members_anchor_scores(self):
        # The uniquely claimed body 5 joins cluster 1's member list before
        # conflicted 4 is scored, pulling 4 along via shared lemmas.
        rps = [
            make_rp(0, "ember dancers"),
            make_rp(1, "umbra dancers"),
            make_rp(2, "vortex dancers"),
            make_rp(3, "willow dancers"),
            make_rp(4, "iran regime", head="regime"),
            make_rp(5, "iran regime aides", head="aides"),
        ]
        s = sym(6, [(0, 1, 0.6), (2, 3, 0.6),
                    (4, 0, 0.55), (4, 1, 0.55), (4, 2, 0.55), (4, 3, 0.55),
                    (5, 2, 0.6)])
        bundle = bundle_from_matrix(rps, s)
        cores = [frozenset({0, 1}), frozenset({2, 3})]
        candidates = form_bodies(cores, bundle, EMPTY_GRID, CFG)
        assert candidates == [{4}, {4, 5}]
        bodies = resolve_conflicts(cores, candidates, bundle)
        # Cluster 1 scores (2 shared lemmas + 0.55*2 + 0) / 3 = 1.033 vs
        # cluster 0's (0 + 1.1) / 2 = 0.55.
        assert bodies == [set(), {4, 5}]


class TestBorders:
    def test_two_positive_links_attach(self):
        rps = [make_rp(i, f"rp{i} members") for i in range(3)]
        s = sym(3, [(0, 1, 0.6), (2, 0, 0.45), (2, 1, 0.42)])
        bundle = bundle_from_matrix(rps, s)
        got = add_borders([frozenset({0, 1})], [set()], bundle, EMPTY_GRID, CFG)
        assert got == [{2}]

    def test_one_link_is_not_enough(self):
        rps = [make_rp(i, f"rp{i} members") for i in range(3)]
        s = sym(3, [(0, 1, 0.6), (2, 0, 0.45)])
        bundle = bundle_from_matrix(rps, s)
        got = add_borders([frozenset({0, 1})], [set()], bundle, EMPTY_GRID, CFG)
        assert got == [set()]

    def test_best_mean_wins(self):
        rps = [make_rp(i, f"rp{i} members") for i in range(8)]
        s = sym(8, [
            (0, 1, 0.6), (2, 3, 0.6),          # two cores
            (5, 0, 0.55), (6, 2, 0.55),        # one body each
            (7, 0, 0.45), (7, 5, 0.71),        # mean 0.58 into cluster 0
            (7, 2, 0.45), (7, 6, 0.77),        # mean 0.61 into cluster 1
        ])
        bundle = bundle_from_matrix(rps, s)
        cores = [frozenset({0, 1}), frozenset({2, 3})]
        bodies = [{5}, {6}]
        got = add_borders(cores, bodies, bundle, EMPTY_GRID, CFG)
        assert got == [set(), {7}]

    def test_grid_must_allow_all_members(self):
        grid = NEGrid(chains=tuple(build_chains([
            NERelation("Aland", "Alandic", "cn"),
            NERelation("Bland", "Blandic", "cn"),
        ])), wt=1.7)
        rps = [
            make_rp(0, "plain members"),
            make_rp(1, "Aland members", ne="Aland"),
            make_rp(2, "Bland members", ne="Bland"),
        ]
        s = sym(3, [(0, 1, 0.6), (2, 0, 0.45), (2, 1, 0.45)])
        bundle = bundle_from_matrix(rps, s)
        got = add_borders([frozenset({0, 1})], [set()], bundle, grid, CFG)
        assert got == [set()]

    def test_borders_never_chain(self):
        rps = [make_rp(i, f"rp{i} members") for i in range(4)]
        s = sym(4, [(0, 1, 0.6),
                    (2, 0, 0.45), (2, 1, 0.42),     # 2 is a border
                    (3, 2, 0.9), (3, 0, 0.45)])     # 3 leans on 2 only
        bundle = bundle_from_matrix(rps, s)
        got = add_borders([frozenset({0, 1})], [set()], bundle,
                          EMPTY_GRID, CFG)
        assert got == [{2}]


class TestNoncore:
    def bundle(self, n, entries):
        rps = [make_rp(i, f"rp{i} members", is_core=False) for i in range(n)]
        return bundle_from_matrix(rps, sym(n, entries))

    def test_pair_forms_cluster(self):
        bundle = self.bundle(2, [(0, 1, 0.55)])
        assert form_noncore({0, 1}, bundle, CFG) == [{0, 1}]

    def test_triangle_clusters_together(self):
        bundle = self.bundle(3, [(0, 1, 0.55), (0, 2, 0.55), (1, 2, 0.55)])
        assert form_noncore({0, 1, 2}, bundle, CFG) == [{0, 1, 2}]

    def test_max_degree_seeds_first(self):
        # 1 touches everything; seeding there absorbs 0 and 2 in one group.
        bundle = self.bundle(4, [(0, 1, 0.55), (1, 2, 0.55), (2, 3, 0.45)])
        assert form_noncore({0, 1, 2, 3}, bundle, CFG) == [{0, 1, 2}]

    def test_below_threshold_ignored(self):
        bundle = self.bundle(2, [(0, 1, 0.49)])
        assert form_noncore({0, 1}, bundle, CFG) == []

    def test_taken_members_stay_taken(self):
        # Star at 2 wins first; the leftover edge 0-1 still forms its own pair.
        entries = [(2, 3, 0.55), (2, 4, 0.55), (2, 5, 0.55),
                   (0, 1, 0.55), (0, 2, 0.55)]
        bundle = self.bundle(6, entries)
        got = form_noncore(set(range(6)), bundle, CFG)
        assert got == [{0, 2, 3, 4, 5}, ]  # 0 absorbed by the star seed
        # 1 keeps no partner once 0 is taken.

    def test_clustered_rps_not_considered(self):
        bundle = self.bundle(3, [(0, 1, 0.55), (1, 2, 0.55)])
        assert form_noncore({0, 1}, bundle, CFG) == [{0, 1}]


class TestRunStages:
    @pytest.mark.parametrize("seed", [0, 3, 11])
    def test_partition_and_numbering(self, seed):
        result = run_engine(make_fixture(seed))
        stages = result.stages
        seen: set[int] = set()
        for cluster in stages.clusters:
            members = cluster.members()
            assert not members & seen
            seen |= members
        ids = [c.cluster_id for c in stages.clusters]
        assert ids == list(range(len(ids)))
        kinds = [c.kind for c in stages.clusters]
        staged_count = sum(1 for k in kinds if k == "staged")
        assert all(k == "staged" for k in kinds[:staged_count])
        assert all(k == "noncore" for k in kinds[staged_count:])
        for cluster in stages.clusters:
            if cluster.kind == "noncore":
                assert not cluster.core_members
                assert len(cluster.members()) >= 2
            else:
                assert len(cluster.core_members) >= 2
