"""Graph data model, Laplacian construction, and the cross-label edge fraction.

A graph is an undirected, non-negatively weighted adjacency matrix with a
zero diagonal, a dense per-node feature matrix, and optional integer node
labels. Instances are treated as immutable after construction and are safe
to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .exceptions import EmptyGraph, InvalidGraph, MissingLabels

__all__ = ["Graph", "Laplacian", "build_laplacian", "heterophily_factor"]


def _as_csr(matrix) -> sp.csr_matrix:
    m = sp.csr_matrix(matrix, dtype=np.float64)
    m.sum_duplicates()
    return m


@dataclass
class Graph:
    """Undirected weighted graph with dense node features.

    adjacency : (N, N) sparse symmetric matrix, zero diagonal, weights >= 0
    features  : (N, d) float array; d may be 0
    labels    : optional (N,) integer array
    """

    adjacency: sp.csr_matrix
    features: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        self.adjacency = _as_csr(self.adjacency)
        n = self.adjacency.shape[0]
        if self.adjacency.shape[1] != n:
            raise InvalidGraph("adjacency must be square")
        self.features = np.atleast_2d(np.asarray(self.features, dtype=np.float64))
        if self.features.shape[0] != n:
            raise InvalidGraph(
                f"features has {self.features.shape[0]} rows for {n} nodes"
            )
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape != (n,):
                raise InvalidGraph("labels length must equal the node count")
        if self.adjacency.nnz:
            if (self.adjacency != self.adjacency.T).nnz != 0:
                raise InvalidGraph("adjacency must be symmetric")
            if self.adjacency.data.min() < 0:
                raise InvalidGraph("edge weights must be non-negative")
        if np.any(self.adjacency.diagonal() != 0.0):
            raise InvalidGraph("adjacency diagonal must be zero (no self loops)")

    @property
    def num_nodes(self) -> int:
        return self.adjacency.shape[0]

    @property
    def num_features(self) -> int:
        return self.features.shape[1]

    @property
    def edge_count(self) -> int:
        """Number of undirected edges, each counted once."""
        return self.adjacency.nnz // 2

    def total_weight(self) -> float:
        """Sum of undirected edge weights, each edge counted once."""
        return float(self.adjacency.sum()) / 2.0

    def edges(self):
        """(rows, cols, weights) of the upper triangle, one entry per edge.

        Cached after the first call; the graph is immutable.
        """
        cached = getattr(self, "_edges_cache", None)
        if cached is None:
            coo = sp.triu(self.adjacency, k=1).tocoo()
            cached = (coo.row.astype(np.int64), coo.col.astype(np.int64), coo.data)
            object.__setattr__(self, "_edges_cache", cached)
        return cached


@dataclass
class Laplacian:
    """Unnormalized graph Laplacian D - A."""

    matrix: sp.csr_matrix
    kind: str = "unnormalized"


def build_laplacian(g: Graph) -> Laplacian:
    """Return L = D - A with D the diagonal degree matrix."""
    degrees = np.asarray(g.adjacency.sum(axis=1)).ravel()
    lap = sp.diags(degrees, format="csr") - g.adjacency
    return Laplacian(matrix=lap.tocsr())


def heterophily_factor(g: Graph) -> float:
    """Fraction of edges whose endpoints carry different labels.

    Counts edges, not weights, so the value is invariant under edge-weight
    scaling. 0 means every edge joins same-label nodes; 1 means none does.
    """
    if g.labels is None:
        raise MissingLabels("heterophily factor needs node labels")
    rows, cols, _ = g.edges()
    if rows.size == 0:
        raise EmptyGraph("heterophily factor needs at least one edge")
    cross = g.labels[rows] != g.labels[cols]
    return float(np.count_nonzero(cross)) / rows.size
