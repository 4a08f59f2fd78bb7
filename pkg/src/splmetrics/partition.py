"""Intersection-set partition of components at a similarity threshold.

Components are grouped into clusters: connected components of the graph
whose edges join pairs meeting the threshold. Gradual similarity is not
transitive, so the transitive closure is taken (a deterministic choice;
a cluster's footprint may span products no single pair connects).
Clusters are then grouped by footprint, the set of products they touch,
yielding the region partition: full commonality (all products), the
pairwise and higher-order overlap regions, and per-product residuals.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

from .errors import ValidationError
from .model import ComponentRef, ProductSet, SimilarityMatrix, Threshold, as_threshold


class UnionFind:
    """Disjoint sets over range(n) with path compression + union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]

    def groups(self) -> list[list[int]]:
        """Members per set, each sorted ascending, ordered by first member."""
        by_root: dict[int, list[int]] = {}
        for x in range(len(self.parent)):
            by_root.setdefault(self.find(x), []).append(x)
        return sorted(by_root.values(), key=lambda members: members[0])


@dataclass(frozen=True)
class Cluster:
    """A maximal group of mutually (transitively) similar components."""

    members: tuple[ComponentRef, ...]
    footprint: frozenset[int]

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class RegionStat:
    cluster_count: int
    component_count: int


@dataclass(frozen=True)
class RegionPartition:
    """Cluster and component-instance counts per nonempty product subset."""

    regions: Mapping[frozenset[int], RegionStat]
    total_clusters: int
    total_components: int
    product_count: int

    def cluster_count(self, footprint: frozenset[int]) -> int:
        stat = self.regions.get(frozenset(footprint))
        return stat.cluster_count if stat else 0

    def component_count(self, footprint: frozenset[int]) -> int:
        stat = self.regions.get(frozenset(footprint))
        return stat.component_count if stat else 0

    def share(self, footprint: frozenset[int]) -> float:
        """Fraction of all clusters falling in this region."""
        if self.total_clusters == 0:
            return 0.0
        return self.cluster_count(footprint) / self.total_clusters


def cluster_components(products: ProductSet, matrix: SimilarityMatrix,
                       threshold: "Threshold | float") -> tuple[Cluster, ...]:
    """Connected components of the meets-threshold graph, via union-find.

    Same-product pairs do merge clusters. Output order is deterministic:
    clusters by first member's global index, members sorted within.
    """
    t = as_threshold(threshold)
    matrix.require_alignment(products)
    refs = products.refs()
    count = len(refs)
    meets = np.asarray(t.meets(matrix.values), dtype=bool)
    uf = UnionFind(count)
    rows, cols = np.nonzero(np.triu(meets, k=1))
    for i, j in zip(rows.tolist(), cols.tolist()):
        uf.union(i, j)
    clusters = []
    for members in uf.groups():
        clusters.append(Cluster(
            members=tuple(refs[m] for m in members),
            footprint=frozenset(products.owner_index(refs[m])
                                for m in members)))
    return tuple(clusters)


def region_partition(clusters: Iterable[Cluster],
                     products: ProductSet) -> RegionPartition:
    """Group clusters by footprint and count clusters/instances per region."""
    clusters = tuple(clusters)
    seen: set[ComponentRef] = set()
    for cluster in clusters:
        for ref in cluster.members:
            if ref in seen:
                raise ValidationError(
                    f"component {ref} appears in more than one cluster")
            seen.add(ref)
    all_refs = set(products.refs())
    if seen != all_refs:
        missing = sorted(str(r) for r in all_refs - seen)[:3]
        raise ValidationError(
            f"clusters do not cover the product set (missing {missing}...)")

    regions: dict[frozenset[int], list[int]] = {}
    for cluster in clusters:
        counts = regions.setdefault(cluster.footprint, [0, 0])
        counts[0] += 1
        counts[1] += len(cluster)
    return RegionPartition(
        regions={fp: RegionStat(c, n) for fp, (c, n) in regions.items()},
        total_clusters=len(clusters),
        total_components=products.total_components,
        product_count=len(products),
    )


def region_order(product_count: int,
                 observed: Iterable[frozenset[int]] = ()) -> list[frozenset[int]]:
    """Canonical region ordering for reports.

    Per-product residuals first, then full commonality, then the partial
    overlaps (larger subsets first, lexicographic within a size). For up
    to 4 products every nonempty subset is listed (stable report columns,
    zeros included); beyond that only observed footprints.
    """
    if product_count <= 4:
        footprints = {
            frozenset(sub)
            for size in range(1, product_count + 1)
            for sub in combinations(range(product_count), size)
        }
    else:
        footprints = {frozenset(fp) for fp in observed}
        footprints.update(frozenset({i}) for i in range(product_count))
        footprints.add(frozenset(range(product_count)))

    def key(fp: frozenset[int]):
        if len(fp) == 1:
            return (0, min(fp), ())
        if len(fp) == product_count:
            return (1, 0, ())
        return (2, product_count - len(fp), tuple(sorted(fp)))

    return sorted(footprints, key=key)
