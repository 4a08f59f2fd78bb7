"""Clustering and the intersection-region partition."""

import random

import pytest

from splmetrics.errors import ValidationError
from splmetrics.model import SimilarityMatrix
from splmetrics.partition import (Cluster, UnionFind, cluster_components,
                                  region_order, region_partition)
from splmetrics.relationship import ExactRelationship, build_matrix

from conftest import (oracle_clusters, product_from_names,
                      random_matrix_fixture, ref)

from splmetrics.model import ProductSet


def footprints(clusters):
    return sorted((sorted(c.footprint), len(c)) for c in clusters)


class TestUnionFind:
    def test_groups_sorted_and_complete(self):
        uf = UnionFind(6)
        uf.union(0, 3)
        uf.union(3, 5)
        uf.union(1, 2)
        assert uf.groups() == [[0, 3, 5], [1, 2], [4]]

    def test_idempotent_unions(self):
        uf = UnionFind(3)
        uf.union(0, 1)
        uf.union(1, 0)
        assert uf.groups() == [[0, 1], [2]]


class TestClusterComponents:
    def test_micro_fixture_exact(self, micro):
        m = build_matrix(micro, ExactRelationship())
        clusters = cluster_components(micro, m, 1.0)
        assert len(clusters) == 5
        sizes = sorted(len(c) for c in clusters)
        assert sizes == [1, 1, 1, 2, 3]
        assert footprints(clusters) == [
            ([0], 1), ([0, 1], 2), ([0, 1, 2], 3), ([1], 1), ([2], 1)]

    def test_chain_merges_transitively(self):
        ps = ProductSet([product_from_names("p1", ["a"]),
                         product_from_names("p2", ["b"]),
                         product_from_names("p3", ["c"])])
        refs = ps.refs()
        m = SimilarityMatrix.from_entries("synthetic", refs, {
            (refs[0], refs[1]): 0.9,
            (refs[1], refs[2]): 0.9,
            (refs[0], refs[2]): 0.1,
        })
        clusters = cluster_components(ps, m, 0.8)
        assert len(clusters) == 1
        assert clusters[0].footprint == {0, 1, 2}

    def test_no_edges_all_singletons(self):
        ps = ProductSet([product_from_names("p1", ["a", "b"]),
                         product_from_names("p2", ["c"])])
        m = SimilarityMatrix.from_entries("synthetic", ps.refs(), {})
        clusters = cluster_components(ps, m, 0.5)
        assert len(clusters) == 3
        assert all(len(c) == 1 for c in clusters)

    def test_same_product_components_may_merge(self):
        ps = ProductSet([product_from_names("p1", ["a", "b"]),
                         product_from_names("p2", ["c"])])
        refs = ps.refs()
        m = SimilarityMatrix.from_entries("synthetic", refs, {
            (ref("p1", "a"), ref("p1", "b")): 0.95,
        })
        clusters = cluster_components(ps, m, 0.9)
        assert footprints(clusters) == [([0], 2), ([1], 1)]

    def test_matches_closure_oracle(self):
        rng = random.Random(99)
        for _ in range(40):
            ps, m = random_matrix_fixture(rng)
            t = rng.choice([0.0, 0.25, 0.5, 0.75, 1.0, rng.random()])
            got = {frozenset(c.members) for c in cluster_components(ps, m, t)}
            assert got == oracle_clusters(ps, m, t)

    def test_lowering_threshold_never_splits(self):
        rng = random.Random(100)
        for _ in range(25):
            ps, m = random_matrix_fixture(rng)
            lo, hi = sorted([rng.random(), rng.random()])
            n_lo = len(cluster_components(ps, m, lo))
            n_hi = len(cluster_components(ps, m, hi))
            assert n_lo <= n_hi


class TestRegionPartition:
    def test_micro_fixture_regions(self, micro):
        m = build_matrix(micro, ExactRelationship())
        part = region_partition(cluster_components(micro, m, 1.0), micro)
        assert part.total_clusters == 5
        assert part.cluster_count(frozenset({0, 1, 2})) == 1
        assert part.cluster_count(frozenset({0, 1})) == 1
        assert part.cluster_count(frozenset({0})) == 1
        assert part.cluster_count(frozenset({1})) == 1
        assert part.cluster_count(frozenset({2})) == 1
        for fp in part.regions:
            assert part.share(fp) == pytest.approx(0.2)
        # instance counts per region
        assert part.component_count(frozenset({0, 1, 2})) == 3
        assert part.component_count(frozenset({0, 1})) == 2

    def test_identical_products_single_region(self):
        names = ["a", "b", "c", "d"]
        ps = ProductSet([product_from_names(f"p{k}", names) for k in range(3)])
        m = build_matrix(ps, ExactRelationship())
        part = region_partition(cluster_components(ps, m, 1.0), ps)
        assert set(part.regions) == {frozenset({0, 1, 2})}
        assert part.cluster_count(frozenset({0, 1, 2})) == 4
        assert part.component_count(frozenset({0, 1, 2})) == 12

    def test_disjoint_products_only_residuals(self):
        ps = ProductSet([product_from_names("p1", ["a1", "a2"]),
                         product_from_names("p2", ["b1", "b2", "b3"])])
        m = build_matrix(ps, ExactRelationship())
        part = region_partition(cluster_components(ps, m, 1.0), ps)
        assert set(part.regions) == {frozenset({0}), frozenset({1})}
        assert part.total_clusters == 5

    def test_invariants_on_random_fixtures(self):
        rng = random.Random(101)
        for _ in range(40):
            ps, m = random_matrix_fixture(rng)
            t = rng.choice([0.0, 0.3, 0.6, 0.9, rng.random()])
            part = region_partition(cluster_components(ps, m, t), ps)
            assert sum(s.cluster_count for s in part.regions.values()) \
                == part.total_clusters
            assert sum(s.component_count for s in part.regions.values()) \
                == ps.total_components

    def test_incomplete_cover_rejected(self, micro):
        m = build_matrix(micro, ExactRelationship())
        clusters = cluster_components(micro, m, 1.0)
        with pytest.raises(ValidationError):
            region_partition(clusters[:-1], micro)

    def test_overlapping_clusters_rejected(self, micro):
        m = build_matrix(micro, ExactRelationship())
        clusters = list(cluster_components(micro, m, 1.0))
        clusters.append(clusters[0])
        with pytest.raises(ValidationError):
            region_partition(clusters, micro)


class TestRegionOrder:
    def test_three_products_paper_layout(self):
        order = region_order(3)
        assert order == [
            frozenset({0}), frozenset({1}), frozenset({2}),
            frozenset({0, 1, 2}),
            frozenset({0, 1}), frozenset({0, 2}), frozenset({1, 2}),
        ]

    def test_two_products(self):
        assert region_order(2) == [
            frozenset({0}), frozenset({1}), frozenset({0, 1})]

    def test_large_n_restricted_to_observed(self):
        observed = [frozenset({0, 1, 2}), frozenset({3, 4})]
        order = region_order(5, observed)
        assert frozenset({3, 4}) in order
        assert frozenset(range(5)) in order
        assert all(len(fp) == 1 for fp in order[:5])
