"""Shared fixtures and independent brute-force oracles.

The oracles re-evaluate every definition straight from its set-builder
form (explicit loops over matrix entries); they never call the code
paths they check.
"""

import random
from collections import Counter

import numpy as np
import pytest

from splmetrics.model import (Component, ComponentRef, Port, Product,
                              ProductSet, SimilarityMatrix)


def make_component(cid, tokens=None, kind="function", ports=(), name=None):
    return Component(id=cid, name=name or cid, kind=kind, ports=tuple(ports),
                     tokens=Counter(tokens if tokens is not None else [cid]))


def product_from_names(pid, names):
    """Product whose components are identified purely by their name token:
    equal names <=> equal fingerprints."""
    return Product(pid, pid, tuple(make_component(n) for n in names))


@pytest.fixture
def micro():
    """The 5-name micro fixture: P1={a,b,c}, P2={a,b,d}, P3={a,e}."""
    return ProductSet([
        product_from_names("p1", ["a", "b", "c"]),
        product_from_names("p2", ["a", "b", "d"]),
        product_from_names("p3", ["a", "e"]),
    ])


def ref(product_id, component_id):
    return ComponentRef(product_id, component_id)


# ---------------------------------------------------------------------------
# random fixtures

def random_matrix_fixture(rng: random.Random):
    """2-4 products of <=8 components with a synthetic symmetric matrix.

    Values are quantized to 2 decimals (with extra mass on exact 0) so
    threshold ties and the N=0 edge case both occur.
    """
    n_products = rng.randint(2, 4)
    products = []
    for k in range(n_products):
        names = [f"c{j}" for j in range(rng.randint(1, 8))]
        products.append(Product(f"p{k}", f"p{k}", tuple(
            make_component(n, tokens=[f"p{k}.{n}"]) for n in names)))
    ps = ProductSet(products)
    refs = ps.refs()
    count = len(refs)
    values = np.zeros((count, count))
    for i in range(count):
        values[i, i] = 1.0
        for j in range(i + 1, count):
            v = 0.0 if rng.random() < 0.25 else round(rng.random(), 2)
            values[i, j] = values[j, i] = v
    return ps, SimilarityMatrix("synthetic", refs, values)


KIND_POOL = ("function", "subsystem")
PORT_POOL = tuple(
    Port(name=f"sig{i}", direction=d, datatype=t)
    for i in range(3)
    for d in ("input", "output")
    for t in ("int", "float")
)
VOCAB = tuple(f"tok{i}" for i in range(12))


def random_gradual_fixture(rng: random.Random, n_products=None):
    """Products with random kinds/ports/token bags for model-based tests."""
    n_products = n_products or rng.randint(2, 4)
    products = []
    for k in range(n_products):
        comps = []
        for j in range(rng.randint(1, 6)):
            tokens = Counter()
            for _ in range(rng.randint(0, 8)):
                tokens[rng.choice(VOCAB)] += 1
            ports = rng.sample(PORT_POOL, rng.randint(0, 3))
            comps.append(Component(
                id=f"c{j}", name=f"c{j}", kind=rng.choice(KIND_POOL),
                ports=tuple(ports), tokens=tokens))
        products.append(Product(f"p{k}", f"p{k}", tuple(comps)))
    return ProductSet(products)


# ---------------------------------------------------------------------------
# brute-force oracles

def oracle_meets(similarity, threshold):
    if threshold > 0:
        return similarity >= threshold
    return similarity > 0


def oracle_shared(component, products, matrix, threshold):
    """Eq-style set-builder: the other products holding some component
    whose similarity to `component` meets the threshold."""
    own = products.owner_index(component)
    shared = set()
    for k, product in enumerate(products.products):
        if k == own:
            continue
        for comp in product.components:
            other = ComponentRef(product.id, comp.id)
            if oracle_meets(matrix.value(component, other), threshold):
                shared.add(k)
                break
    return frozenset(shared)


def oracle_ir(i, products, matrix, threshold):
    product = products.products[i]
    unshared = [
        c for c in product.components
        if not oracle_shared(ComponentRef(product.id, c.id),
                             products, matrix, threshold)
    ]
    return len(unshared) / len(product.components)


def oracle_prr(i, products, matrix, threshold):
    product = products.products[i]
    everyone = frozenset(range(len(products))) - {i}
    fully = [
        c for c in product.components
        if oracle_shared(ComponentRef(product.id, c.id),
                         products, matrix, threshold) == everyone
    ]
    return len(fully) / len(product.components)


def oracle_soc(products, matrix, threshold):
    count = 0
    for i, product in enumerate(products.products):
        everyone = frozenset(range(len(products))) - {i}
        for c in product.components:
            if oracle_shared(ComponentRef(product.id, c.id),
                             products, matrix, threshold) == everyone:
                count += 1
    return count, count / products.total_components


def oracle_clusters(products, matrix, threshold):
    """Transitive-closure clustering by BFS over the meets graph.

    Returns a set of frozensets of ComponentRef for order-free comparison.
    """
    refs = list(products.refs())
    unvisited = set(range(len(refs)))
    clusters = set()
    while unvisited:
        start = min(unvisited)
        queue = [start]
        unvisited.discard(start)
        members = {start}
        while queue:
            node = queue.pop()
            for other in list(unvisited):
                sim = matrix.value(refs[node], refs[other])
                if oracle_meets(sim, threshold):
                    unvisited.discard(other)
                    members.add(other)
                    queue.append(other)
        clusters.add(frozenset(refs[m] for m in members))
    return clusters
