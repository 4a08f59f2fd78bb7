"""Reuse metrics over a product set at one threshold or across a sweep.

Three metrics, all derived from per-component counterpart information:

- size of commonality (soc): how many component instances have a
  counterpart in every other product (count and instance-normalized
  ratio);
- product-related reusability (prr_i): the fraction of product i's
  components with counterparts in *all* other products;
- individualization ratio (ir_i): the fraction of product i's components
  with a counterpart in *no* other product.

SoC counts component instances, not clusters, so it is monotone as the
threshold falls; region tables count clusters separately.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError
from .model import ProductSet, SimilarityMatrix, Threshold, as_threshold
from .partition import RegionPartition, cluster_components, region_partition
from .relationship import RelationshipModel, build_matrix

#: Default sweep schedule, highest threshold first.
DEFAULT_SCHEDULE = (0.99, 0.95, 0.90, 0.85, 0.80, 0.75, 0.70, 0.65, 0.60,
                    0.50, 0.40, 0.30, 0.15, 0.0)


@dataclass(frozen=True)
class ProductMetrics:
    product_id: str
    size: int
    prr: float
    ir: float


@dataclass(frozen=True)
class MetricsReport:
    """All metrics for one product set at one threshold."""

    threshold: float
    model_id: str
    soc_count: int
    soc_ratio: float
    per_product: tuple[ProductMetrics, ...]
    partition: RegionPartition


@dataclass(frozen=True)
class SweepResult:
    """Metric reports over a strictly descending threshold schedule."""

    rows: tuple[MetricsReport, ...]
    product_ids: tuple[str, ...]

    def crossover_thresholds(self) -> dict[str, float | None]:
        """Largest threshold at which each product's prr strictly exceeds
        its ir; None when that never happens within the schedule."""
        out: dict[str, float | None] = {pid: None for pid in self.product_ids}
        for idx, pid in enumerate(self.product_ids):
            for row in self.rows:
                pm = row.per_product[idx]
                if pm.prr > pm.ir:
                    out[pid] = row.threshold
                    break
        return out

    def crossover_all(self) -> float | None:
        """Largest threshold at which prr exceeds ir for every product."""
        for row in self.rows:
            if all(pm.prr > pm.ir for pm in row.per_product):
                return row.threshold
        return None


def counterpart_table(products: ProductSet, matrix: SimilarityMatrix,
                      threshold: "Threshold | float") -> np.ndarray:
    """Boolean table[g, k]: does product k hold a counterpart of the
    component at global index g (own product included)?"""
    t = as_threshold(threshold)
    matrix.require_alignment(products)
    meets = np.asarray(t.meets(matrix.values), dtype=bool)
    columns = [
        meets[:, products.product_slice(k)].any(axis=1)
        for k in range(len(products))
    ]
    return np.stack(columns, axis=1)


def _shared_with_others(products: ProductSet, table: np.ndarray) -> np.ndarray:
    """counts[g] = number of *other* products holding a counterpart of g."""
    counts = table.sum(axis=1, dtype=np.int64)
    for k in range(len(products)):
        sl = products.product_slice(k)
        counts[sl] -= table[sl, k]
    return counts


def _check_index(i: int, products: ProductSet) -> None:
    if not 0 <= i < len(products):
        raise IndexError(
            f"product index {i} out of range for {len(products)} products")


def individualization_ratio(i: int, products: ProductSet,
                            matrix: SimilarityMatrix,
                            threshold: "Threshold | float") -> float:
    """Fraction of product i's components with no counterpart anywhere else."""
    _check_index(i, products)
    table = counterpart_table(products, matrix, threshold)
    counts = _shared_with_others(products, table)
    sl = products.product_slice(i)
    unshared = int(np.sum(counts[sl] == 0))
    return unshared / (sl.stop - sl.start)


def product_reusability(i: int, products: ProductSet,
                        matrix: SimilarityMatrix,
                        threshold: "Threshold | float") -> float:
    """Fraction of product i's components shared with *every* other product."""
    _check_index(i, products)
    table = counterpart_table(products, matrix, threshold)
    counts = _shared_with_others(products, table)
    sl = products.product_slice(i)
    fully_shared = int(np.sum(counts[sl] == len(products) - 1))
    return fully_shared / (sl.stop - sl.start)


def size_of_commonality(products: ProductSet, matrix: SimilarityMatrix,
                        threshold: "Threshold | float") -> tuple[int, float]:
    """Instances with counterparts in every other product: (count, ratio)."""
    table = counterpart_table(products, matrix, threshold)
    counts = _shared_with_others(products, table)
    count = int(np.sum(counts == len(products) - 1))
    return count, count / products.total_components


def relative_growth(base_count: int, grown_count: int) -> float:
    """Relative change grown/base - 1 (e.g. commonality growth between
    two relationship models)."""
    if base_count <= 0:
        raise ConfigurationError("baseline count must be positive")
    return grown_count / base_count - 1.0


def analyze(products: ProductSet, model: RelationshipModel | None = None,
            threshold: "Threshold | float" = 1.0, *,
            matrix: SimilarityMatrix | None = None, workers: int = 1,
            backend: str | None = None) -> MetricsReport:
    """Assemble matrix (unless supplied), partition and all metrics."""
    t = as_threshold(threshold)
    if matrix is None:
        if model is None:
            raise ConfigurationError("analyze needs a model or a matrix")
        matrix = build_matrix(products, model, workers=workers,
                              backend=backend)
    else:
        matrix.require_alignment(products)

    table = counterpart_table(products, matrix, t)
    counts = _shared_with_others(products, table)
    everywhere = len(products) - 1
    per_product = []
    soc_count = 0
    for k, product in enumerate(products):
        sl = products.product_slice(k)
        size = sl.stop - sl.start
        fully_shared = int(np.sum(counts[sl] == everywhere))
        unshared = int(np.sum(counts[sl] == 0))
        soc_count += fully_shared
        per_product.append(ProductMetrics(
            product_id=product.id, size=size,
            prr=fully_shared / size, ir=unshared / size))

    clusters = cluster_components(products, matrix, t)
    return MetricsReport(
        threshold=t.value,
        model_id=matrix.model_id,
        soc_count=soc_count,
        soc_ratio=soc_count / products.total_components,
        per_product=tuple(per_product),
        partition=region_partition(clusters, products),
    )


def validate_schedule(schedule: Iterable[float]) -> tuple[float, ...]:
    """Check a threshold schedule and return it sorted descending."""
    values = [as_threshold(v).value for v in schedule]
    if not values:
        raise ConfigurationError("threshold schedule is empty")
    if len(set(values)) != len(values):
        raise ConfigurationError("threshold schedule contains duplicates")
    return tuple(sorted(values, reverse=True))


def sweep(products: ProductSet, model: RelationshipModel,
          schedule: Sequence[float] | None = None, *, workers: int = 1,
          backend: str | None = None) -> SweepResult:
    """One report per threshold, descending; the matrix is built once."""
    thresholds = validate_schedule(
        DEFAULT_SCHEDULE if schedule is None else schedule)
    matrix = build_matrix(products, model, workers=workers, backend=backend)
    rows = tuple(
        analyze(products, threshold=t, matrix=matrix) for t in thresholds)
    return SweepResult(rows=rows,
                       product_ids=tuple(p.id for p in products))
