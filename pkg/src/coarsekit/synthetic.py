"""Seeded synthetic graphs for benchmarks and tests.

The benchmark generator is a preferential-attachment process: each new node
attaches to ``edges_per_node`` distinct existing nodes chosen proportionally
to degree, which keeps the edge count linear in the node count.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .graph import Graph

__all__ = ["preferential_attachment_graph", "random_graph"]


def preferential_attachment_graph(
    n: int,
    edges_per_node: int = 5,
    feature_dim: int = 16,
    n_classes: int = 5,
    seed: int = 0,
) -> Graph:
    """Preferential-attachment graph with Gaussian features and random labels."""
    m = min(edges_per_node, max(1, n - 1))
    rng = np.random.default_rng(seed)
    sources = []
    targets = []
    # Every endpoint lands in `repeated`, so sampling an index from it is
    # degree-proportional sampling.
    repeated = list(range(m))
    current = list(range(m))
    for source in range(m, n):
        picked = set()
        while len(picked) < m:
            pool = repeated if repeated else current
            picked.add(pool[int(rng.random() * len(pool))])
        for t in picked:
            sources.append(source)
            targets.append(t)
            repeated.append(source)
            repeated.append(t)
    rows = np.array(sources + targets, dtype=np.int64)
    cols = np.array(targets + sources, dtype=np.int64)
    data = np.ones(rows.size, dtype=np.float64)
    adjacency = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
    adjacency.sum_duplicates()
    adjacency.data[:] = 1.0  # simple graph: duplicate attachments collapse
    features = rng.standard_normal((n, feature_dim))
    labels = rng.integers(0, n_classes, size=n)
    return Graph(adjacency=adjacency, features=features, labels=labels)


def random_graph(
    n: int,
    density: float = 0.2,
    feature_dim: int = 4,
    n_classes: int = 3,
    weighted: bool = True,
    with_labels: bool = True,
    seed: int = 0,
) -> Graph:
    """Small dense-ish random graph; guaranteed to have at least one edge."""
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < density, k=1)
    if not upper.any() and n >= 2:
        upper[0, 1] = True
    weights = np.zeros((n, n))
    if weighted:
        weights[upper] = rng.uniform(0.5, 2.0, size=int(upper.sum()))
    else:
        weights[upper] = 1.0
    dense = weights + weights.T
    features = rng.standard_normal((n, feature_dim))
    labels = rng.integers(0, n_classes, size=n) if with_labels else None
    return Graph(adjacency=sp.csr_matrix(dense), features=features, labels=labels)
