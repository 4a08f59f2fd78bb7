"""Domain types for product-line potential analysis.

A legacy software variant is a :class:`Product`: a named set of
:class:`Component` instances (the atomic units of comparison). Components
carry an interface (ports), a normalized token multiset describing their
content, and a fingerprint that makes "identical" decidable. A
:class:`SimilarityMatrix` holds pairwise similarity over every component
of every product in a :class:`ProductSet`.

All types are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import hashlib
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import ConfigurationError, UnknownComponentError, ValidationError

DIRECTIONS = ("input", "output")

_WS_RUN = re.compile(r"\s+")


@dataclass(frozen=True)
class Port:
    """One element of a component's interface."""

    name: str
    direction: str
    datatype: str = ""

    def __post_init__(self):
        if not self.name:
            raise ValidationError("port name must be non-empty")
        if self.direction not in DIRECTIONS:
            raise ValidationError(
                f"port {self.name!r}: direction must be one of {DIRECTIONS}, "
                f"got {self.direction!r}")

    def descriptor(self) -> str:
        """Normalized `direction:name:datatype` form used for comparison."""
        name = self.name.lower()
        datatype = _WS_RUN.sub(" ", self.datatype.strip()).lower()
        return f"{self.direction}:{name}:{datatype}"


def _encode(parts: Iterable[str]) -> bytes:
    # length-prefixed so no separator can collide with content
    out = bytearray()
    for part in parts:
        raw = part.encode("utf-8")
        out += b"%d:" % len(raw)
        out += raw
    return bytes(out)


def content_fingerprint(kind: str, ports: Iterable[Port],
                        tokens: Mapping[str, int]) -> str:
    """Digest of (kind, normalized interface, token multiset).

    Deterministic: equal inputs always map to the same digest, and port
    order does not matter (descriptors are sorted first).
    """
    h = hashlib.sha256()
    h.update(_encode([kind]))
    h.update(_encode(sorted(p.descriptor() for p in ports)))
    h.update(_encode(f"{tok}\x00{count}" for tok, count in sorted(tokens.items())))
    return h.hexdigest()


@dataclass(frozen=True, eq=False)
class Component:
    """An atomic piece of one product.

    ``tokens`` is a multiset of normalized content tokens;
    ``exact_fingerprint`` is derived, never supplied.
    """

    id: str
    name: str
    kind: str
    ports: tuple[Port, ...] = ()
    tokens: Counter = field(default_factory=Counter)
    exact_fingerprint: str = field(init=False)

    def __post_init__(self):
        if not self.id:
            raise ValidationError("component id must be non-empty")
        object.__setattr__(self, "ports", tuple(self.ports))
        counts = Counter()
        if isinstance(self.tokens, Mapping):
            for tok, cnt in self.tokens.items():
                if cnt < 0:
                    raise ValidationError(
                        f"component {self.id!r}: negative count for token {tok!r}")
                if cnt:
                    counts[str(tok)] = int(cnt)
        else:
            counts.update(str(t) for t in self.tokens)
        object.__setattr__(self, "tokens", counts)
        object.__setattr__(
            self, "exact_fingerprint",
            content_fingerprint(self.kind, self.ports, counts))

    def port_descriptors(self) -> frozenset[str]:
        return frozenset(p.descriptor() for p in self.ports)

    def __eq__(self, other):
        if not isinstance(other, Component):
            return NotImplemented
        return (self.id, self.name, self.kind, self.ports, self.tokens) == \
               (other.id, other.name, other.kind, other.ports, other.tokens)


@dataclass(frozen=True)
class Product:
    """One legacy software variant, decomposed into components."""

    id: str
    name: str
    components: tuple[Component, ...]

    def __post_init__(self):
        if not self.id:
            raise ValidationError("product id must be non-empty")
        comps = sorted(self.components, key=lambda c: c.id)
        if not comps:
            raise ValidationError(f"product {self.id!r} has no components")
        seen = set()
        for c in comps:
            if c.id in seen:
                raise ValidationError(
                    f"product {self.id!r}: duplicate component id {c.id!r}")
            seen.add(c.id)
        object.__setattr__(self, "components", tuple(comps))

    def __len__(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class ComponentRef:
    """Stable reference to one component instance: (product id, component id)."""

    product: str
    component: str

    def __str__(self) -> str:
        return f"{self.product}/{self.component}"


class ProductSet:
    """An ordered collection of at least two products.

    The order fixes the product index used by every metric and region
    label. Provides the global component ordering shared with
    :class:`SimilarityMatrix`: products in order, components sorted by id.
    """

    def __init__(self, products: Iterable[Product]):
        self.products = tuple(products)
        if len(self.products) < 2:
            raise ValidationError(
                f"a product set needs at least 2 products, got {len(self.products)}")
        seen = set()
        for p in self.products:
            if p.id in seen:
                raise ValidationError(f"duplicate product id {p.id!r}")
            seen.add(p.id)
        refs = []
        owners = []
        comps = {}
        for k, product in enumerate(self.products):
            for comp in product.components:
                ref = ComponentRef(product.id, comp.id)
                refs.append(ref)
                owners.append(k)
                comps[ref] = comp
        self._refs = tuple(refs)
        self._owner = dict(zip(refs, owners))
        self._components = comps
        bounds = np.cumsum([0] + [len(p) for p in self.products])
        self._slices = tuple(
            slice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]))

    def __len__(self) -> int:
        return len(self.products)

    def __iter__(self) -> Iterator[Product]:
        return iter(self.products)

    def __eq__(self, other):
        return isinstance(other, ProductSet) and self.products == other.products

    @property
    def total_components(self) -> int:
        return len(self._refs)

    def refs(self) -> tuple[ComponentRef, ...]:
        """All component references in global order."""
        return self._refs

    def component(self, ref: ComponentRef) -> Component:
        try:
            return self._components[ref]
        except KeyError:
            raise UnknownComponentError(f"unknown component {ref}") from None

    def owner_index(self, ref: ComponentRef) -> int:
        """Index of the product owning `ref`."""
        try:
            return self._owner[ref]
        except KeyError:
            raise UnknownComponentError(f"unknown component {ref}") from None

    def product_slice(self, index: int) -> slice:
        """Global-order slice covering product `index`'s components."""
        return self._slices[index]


@dataclass(frozen=True)
class Threshold:
    """Similarity cut-off in [0, 1].

    A pair counts as shared when similarity >= value, except at value 0
    where only strictly positive similarity counts (zero similarity must
    never make two components "shared").
    """

    value: float

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ConfigurationError(
                f"threshold must lie in [0, 1], got {self.value}")

    def meets(self, similarity):
        """Elementwise shared-test; works on scalars and numpy arrays."""
        if self.value > 0.0:
            return similarity >= self.value
        return similarity > 0.0


def as_threshold(value: "Threshold | float") -> Threshold:
    if isinstance(value, Threshold):
        return value
    return Threshold(float(value))


class SimilarityMatrix:
    """Symmetric pairwise similarity over all components of a product set.

    Values are stored dense over the global component order. Entries exist
    for every unordered pair, including same-product and self pairs.
    """

    def __init__(self, model_id: str, refs: Iterable[ComponentRef],
                 values: np.ndarray):
        self.model_id = model_id
        self.refs = tuple(refs)
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (len(self.refs), len(self.refs)):
            raise ValidationError(
                f"matrix shape {values.shape} does not match "
                f"{len(self.refs)} components")
        values.setflags(write=False)
        self.values = values
        self._pos = {ref: i for i, ref in enumerate(self.refs)}

    @classmethod
    def from_entries(cls, model_id: str, refs: Iterable[ComponentRef],
                     entries: Mapping) -> "SimilarityMatrix":
        """Build from a mapping over unordered ref pairs (testing aid).

        Missing pairs default to 0; the diagonal defaults to 1. Symmetry
        conflicts and out-of-range values are rejected.
        """
        refs = tuple(refs)
        pos = {ref: i for i, ref in enumerate(refs)}
        values = np.zeros((len(refs), len(refs)))
        np.fill_diagonal(values, 1.0)
        for (a, b), sim in entries.items():
            if a not in pos or b not in pos:
                raise UnknownComponentError(f"unknown pair ({a}, {b})")
            if not 0.0 <= sim <= 1.0:
                raise ValidationError(f"similarity {sim} out of [0, 1]")
            i, j = pos[a], pos[b]
            values[i, j] = sim
            values[j, i] = sim
        rev = {(b, a): s for (a, b), s in entries.items()}
        for pair, sim in entries.items():
            if pair in rev and rev[pair] != sim:
                raise ValidationError(f"asymmetric entries for pair {pair}")
        return cls(model_id, refs, values)

    def position(self, ref: ComponentRef) -> int:
        try:
            return self._pos[ref]
        except KeyError:
            raise UnknownComponentError(f"unknown component {ref}") from None

    def value(self, a: ComponentRef, b: ComponentRef) -> float:
        return float(self.values[self.position(a), self.position(b)])

    def aligned_with(self, products: ProductSet) -> bool:
        return self.refs == products.refs()

    def require_alignment(self, products: ProductSet) -> None:
        if not self.aligned_with(products):
            raise ValidationError(
                "similarity matrix does not cover this product set "
                "(component order mismatch)")


def shared_products(component: ComponentRef, products: ProductSet,
                    matrix: SimilarityMatrix,
                    threshold: "Threshold | float") -> frozenset[int]:
    """Indices of the *other* products holding a counterpart of `component`.

    Product k (k != owner) is included when some component of product k has
    similarity to `component` meeting the threshold.
    """
    t = as_threshold(threshold)
    own = products.owner_index(component)
    matrix.require_alignment(products)
    row = matrix.values[matrix.position(component)]
    shared = set()
    for k in range(len(products)):
        if k == own:
            continue
        if bool(np.any(t.meets(row[products.product_slice(k)]))):
            shared.add(k)
    return frozenset(shared)
