#!/usr/bin/env python3
"""Benchmark the similarity-matrix kernels: compiled vs pure Python.

Builds a synthetic product set, times `build_matrix` for every available
backend (and a couple of worker counts for the compiled one), and checks
that all runs produce bitwise-identical matrices.

Usage:
    python benchmarks/bench_matrix.py
    python benchmarks/bench_matrix.py --products 3 --components 300 --repeat 3
"""

import argparse
import random
import time
from collections import Counter

from splmetrics._kernels import available_backends
from splmetrics.model import Component, Port, Product, ProductSet
from splmetrics.relationship import GradualRelationship, build_matrix

PORT_POOL = tuple(
    Port(name=f"sig{i}", direction=d, datatype=t)
    for i in range(8)
    for d in ("input", "output")
    for t in ("int", "float", "double")
)


def synthetic_products(rng, n_products, n_components, n_tokens):
    vocab = [f"tok{i}" for i in range(600)]
    products = []
    for k in range(n_products):
        comps = []
        for j in range(n_components):
            tokens = Counter()
            for _ in range(rng.randint(n_tokens // 2, n_tokens)):
                tokens[rng.choice(vocab)] += 1
            comps.append(Component(
                id=f"c{j:04d}", name=f"c{j:04d}",
                kind="function" if rng.random() < 0.9 else "subsystem",
                ports=tuple(rng.sample(PORT_POOL, rng.randint(0, 6))),
                tokens=tokens))
        products.append(Product(f"p{k}", f"p{k}", tuple(comps)))
    return ProductSet(products)


def time_build(products, model, backend, workers, repeat):
    best = float("inf")
    matrix = None
    for _ in range(repeat):
        start = time.perf_counter()
        matrix = build_matrix(products, model, workers=workers,
                              backend=backend)
        best = min(best, time.perf_counter() - start)
    return best, matrix


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--products", type=int, default=3)
    parser.add_argument("--components", type=int, default=120,
                        help="components per product")
    parser.add_argument("--tokens", type=int, default=80,
                        help="max tokens per component")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=20100405)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    products = synthetic_products(rng, args.products, args.components,
                                  args.tokens)
    total = products.total_components
    pairs = total * (total + 1) // 2
    print(f"fixture: {len(products)} products x {args.components} components "
          f"= {total} components, {pairs} unordered pairs")

    model = GradualRelationship()
    runs = []
    for backend in available_backends():
        worker_counts = (1, 4) if backend == "cython" else (1,)
        for workers in worker_counts:
            elapsed, matrix = time_build(products, model, backend, workers,
                                         args.repeat)
            runs.append((backend, workers, elapsed, matrix))

    baseline = max(elapsed for _, _, elapsed, _ in runs)
    print(f"\n{'backend':<10} {'workers':>7} {'seconds':>10} "
          f"{'pairs/s':>12} {'speedup':>8}")
    for backend, workers, elapsed, _ in runs:
        print(f"{backend:<10} {workers:>7} {elapsed:>10.4f} "
              f"{pairs / elapsed:>12.0f} {baseline / elapsed:>7.1f}x")

    reference = runs[0][3].values.tobytes()
    identical = all(m.values.tobytes() == reference for _, _, _, m in runs)
    print(f"\nall matrices bitwise identical: {identical}")
    if not identical:
        raise SystemExit("backend mismatch!")


if __name__ == "__main__":
    main()
