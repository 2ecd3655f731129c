import numpy as np
import pytest
import scipy.sparse as sp

from coarsekit import Graph, HeteroGraph


def make_graph(dense, features=None, labels=None) -> Graph:
    dense = np.asarray(dense, dtype=np.float64)
    n = dense.shape[0]
    if features is None:
        features = np.eye(n)
    return Graph(adjacency=sp.csr_matrix(dense), features=features, labels=labels)


def path_graph(n: int, features=None, labels=None) -> Graph:
    dense = np.zeros((n, n))
    for i in range(n - 1):
        dense[i, i + 1] = dense[i + 1, i] = 1.0
    return make_graph(dense, features=features, labels=labels)


@pytest.fixture
def p3() -> Graph:
    return path_graph(3)


@pytest.fixture
def k4() -> Graph:
    dense = np.ones((4, 4)) - np.eye(4)
    return make_graph(dense)


def random_relation(rng, n_src, n_dst, n_edges, weighted=False) -> sp.csr_matrix:
    rows = rng.integers(0, n_src, n_edges)
    cols = rng.integers(0, n_dst, n_edges)
    data = rng.uniform(0.5, 2.0, n_edges) if weighted else np.ones(n_edges)
    mat = sp.csr_matrix((data, (rows, cols)), shape=(n_src, n_dst))
    mat.sum_duplicates()
    return mat


def toy_hetero(seed=0, counts=(40, 24, 16), featureless_last=True) -> HeteroGraph:
    """Three-type graph: a-b and b-c relations plus an a-a self relation."""
    rng = np.random.default_rng(seed)
    na, nb, nc = counts
    features = {
        "a": rng.standard_normal((na, 5)),
        "b": rng.standard_normal((nb, 3)),
        "c": None if featureless_last else rng.standard_normal((nc, 2)),
    }
    relations = {
        ("a", "links", "b"): random_relation(rng, na, nb, 3 * na),
        ("b", "links", "c"): random_relation(rng, nb, nc, 2 * nb),
        ("a", "knows", "a"): random_relation(rng, na, na, na),
    }
    return HeteroGraph(
        node_types=["a", "b", "c"],
        counts={"a": na, "b": nb, "c": nc},
        features=features,
        relations=relations,
        target_type="a",
        target_labels=rng.integers(0, 3, na),
    )
