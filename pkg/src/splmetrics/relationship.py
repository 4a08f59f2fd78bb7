"""Relationship models: how similar are two components?

Two models are provided. The exact model declares two components related
(similarity 1) only when their content fingerprints match, i.e. they are
identical up to the normalization applied at ingest time. The gradual
model scores partial similarity in [0, 1]: components of different kinds
score 0; otherwise the score is a weighted sum of the Jaccard index over
normalized port descriptors (signature part) and the multiset Jaccard
index over content tokens (behavior part).

`build_matrix` materializes a model over every component pair of a
product set, dispatching the hot loop to a kernel backend (compiled or
pure Python, see `_kernels`).
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np

from ._kernels import get_backend
from .errors import ConfigurationError
from .model import Component, ProductSet, SimilarityMatrix

#: |w_sig + w_beh - 1| may deviate by at most this much (float round-off
#: in user-supplied weights like 0.3/0.7).
WEIGHT_SUM_TOLERANCE = 1e-9

DEFAULT_SIGNATURE_WEIGHT = 0.5
DEFAULT_BEHAVIOR_WEIGHT = 0.5


def check_weights(signature_weight: float, behavior_weight: float) -> None:
    if signature_weight < 0 or behavior_weight < 0:
        raise ConfigurationError(
            f"weights must be non-negative, got w_sig={signature_weight} "
            f"w_beh={behavior_weight}")
    if abs(signature_weight + behavior_weight - 1.0) > WEIGHT_SUM_TOLERANCE:
        raise ConfigurationError(
            f"weights must sum to 1, got w_sig={signature_weight} "
            f"w_beh={behavior_weight}")


def exact_similarity(a: Component, b: Component) -> float:
    """1.0 when the components' fingerprints match, else 0.0."""
    return 1.0 if a.exact_fingerprint == b.exact_fingerprint else 0.0


def gradual_similarity(a: Component, b: Component,
                       signature_weight: float = DEFAULT_SIGNATURE_WEIGHT,
                       behavior_weight: float = DEFAULT_BEHAVIOR_WEIGHT) -> float:
    """Weighted signature/behavior similarity in [0, 1].

    Components of different kinds are never similar. The Jaccard index of
    two empty collections is 1 (two components with no ports have
    identical interfaces).
    """
    check_weights(signature_weight, behavior_weight)
    if a.kind != b.kind:
        return 0.0
    jp = _set_jaccard(a.port_descriptors(), b.port_descriptors())
    jt = _multiset_jaccard(a.tokens, b.tokens)
    if jp == 1.0 and jt == 1.0:
        return 1.0
    s = signature_weight * jp + behavior_weight * jt
    if s > 1.0:
        s = 1.0
    return s


def _set_jaccard(a: frozenset, b: frozenset) -> float:
    union = len(a | b)
    if union == 0:
        return 1.0
    return len(a & b) / union


def _multiset_jaccard(a: Counter, b: Counter) -> float:
    mins = 0
    maxs = 0
    for key in a.keys() | b.keys():
        x = a.get(key, 0)
        y = b.get(key, 0)
        if x < y:
            mins += x
            maxs += y
        else:
            mins += y
            maxs += x
    if maxs == 0:
        return 1.0
    return mins / maxs


@dataclass(frozen=True)
class ExactRelationship:
    """Identity-only relationship: similarity is 1 or 0."""

    model_id: ClassVar[str] = "exact"

    def evaluate(self, a: Component, b: Component) -> float:
        return exact_similarity(a, b)


@dataclass(frozen=True)
class GradualRelationship:
    """Partial-similarity relationship with signature/behavior weights."""

    signature_weight: float = DEFAULT_SIGNATURE_WEIGHT
    behavior_weight: float = DEFAULT_BEHAVIOR_WEIGHT

    model_id: ClassVar[str] = "gradual"

    def __post_init__(self):
        check_weights(self.signature_weight, self.behavior_weight)

    def evaluate(self, a: Component, b: Component) -> float:
        return gradual_similarity(a, b, self.signature_weight,
                                  self.behavior_weight)


RelationshipModel = Union[ExactRelationship, GradualRelationship]


def make_model(model_id: str,
               signature_weight: float = DEFAULT_SIGNATURE_WEIGHT,
               behavior_weight: float = DEFAULT_BEHAVIOR_WEIGHT) -> RelationshipModel:
    if model_id == "exact":
        return ExactRelationship()
    if model_id == "gradual":
        return GradualRelationship(signature_weight, behavior_weight)
    raise ConfigurationError(f"unknown relationship model {model_id!r}")


@dataclass(frozen=True)
class _Packed:
    """Flat integer view of a product set's components.

    Per-component id runs (ports, tokens) are sorted ascending so the
    kernels can merge-join them.
    """

    kind_ids: np.ndarray
    fp_ids: np.ndarray
    port_ids: np.ndarray
    port_offsets: np.ndarray
    token_ids: np.ndarray
    token_counts: np.ndarray
    token_offsets: np.ndarray


def _intern(table: dict, key: str) -> int:
    ident = table.get(key)
    if ident is None:
        ident = len(table)
        table[key] = ident
    return ident


def pack_components(products: ProductSet) -> _Packed:
    kinds: dict = {}
    fps: dict = {}
    ports: dict = {}
    vocab: dict = {}
    kind_ids = []
    fp_ids = []
    port_ids: list[int] = []
    port_offsets = [0]
    token_ids: list[int] = []
    token_counts: list[int] = []
    token_offsets = [0]
    for ref in products.refs():
        comp = products.component(ref)
        kind_ids.append(_intern(kinds, comp.kind))
        fp_ids.append(_intern(fps, comp.exact_fingerprint))
        port_ids.extend(sorted(
            _intern(ports, d) for d in sorted(comp.port_descriptors())))
        port_offsets.append(len(port_ids))
        for tid, count in sorted(
                (_intern(vocab, tok), count)
                for tok, count in comp.tokens.items()):
            token_ids.append(tid)
            token_counts.append(count)
        token_offsets.append(len(token_ids))
    return _Packed(
        kind_ids=np.asarray(kind_ids, dtype=np.int32),
        fp_ids=np.asarray(fp_ids, dtype=np.int32),
        port_ids=np.asarray(port_ids, dtype=np.int32),
        port_offsets=np.asarray(port_offsets, dtype=np.int64),
        token_ids=np.asarray(token_ids, dtype=np.int32),
        token_counts=np.asarray(token_counts, dtype=np.int64),
        token_offsets=np.asarray(token_offsets, dtype=np.int64),
    )


def _row_chunks(count: int, workers: int) -> list[tuple[int, int]]:
    # balance by pair count: row i contributes (count - i) pairs
    if workers <= 1 or count <= 1:
        return [(0, count)]
    workers = min(workers, count)
    total = count * (count + 1) / 2
    target = total / workers
    chunks = []
    start = 0
    acc = 0.0
    for i in range(count):
        acc += count - i
        if acc >= target:
            chunks.append((start, i + 1))
            start = i + 1
            acc = 0.0
            if len(chunks) == workers - 1:
                break
    if start < count:
        chunks.append((start, count))
    return chunks


def build_matrix(products: ProductSet, model: RelationshipModel,
                 workers: int = 1,
                 backend: str | None = None) -> SimilarityMatrix:
    """Evaluate `model` over every unordered component pair of `products`.

    Deterministic regardless of `workers` or backend: workers fill
    disjoint, preallocated row ranges with values of a pure function.
    """
    if workers < 1:
        raise ConfigurationError(f"workers must be >= 1, got {workers}")
    _, kernels = get_backend(backend)
    packed = pack_components(products)
    refs = products.refs()
    count = len(refs)
    out = np.zeros((count, count), dtype=np.float64)

    if model.model_id == "exact":
        def fill(row_start, row_end):
            kernels.exact_rows(packed.fp_ids, out, row_start, row_end)
    elif model.model_id == "gradual":
        def fill(row_start, row_end):
            kernels.gradual_rows(
                packed.kind_ids, packed.port_ids, packed.port_offsets,
                packed.token_ids, packed.token_counts, packed.token_offsets,
                model.signature_weight, model.behavior_weight,
                out, row_start, row_end)
    else:
        raise ConfigurationError(
            f"cannot build a matrix for model {model.model_id!r}")

    chunks = _row_chunks(count, workers)
    if len(chunks) == 1:
        fill(*chunks[0])
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            futures = [pool.submit(fill, lo, hi) for lo, hi in chunks]
            for future in futures:
                future.result()
    return SimilarityMatrix(model.model_id, refs, out)
