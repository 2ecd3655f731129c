"""Random-projection hashing of blended feature/structure rows.

Each node is scored by projecting the virtual row
``(1 - alpha) * X_i  ++  alpha * A_i`` through a shared Gaussian projection
matrix. The concatenation is never materialized (it would be O(N^2) memory);
the weight matrix is split into a feature block and a structure block and the
two partial products are summed. Sorting the aggregated scores yields the
node order that seeds the merge ring.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .exceptions import DimensionMismatch, InvalidDimension
from .graph import Graph

__all__ = [
    "ProjectionSet",
    "ScoreVector",
    "NodeOrder",
    "sample_projections",
    "hash_scores",
    "project_scores",
    "build_order",
    "zscore_columns",
]

AGGREGATES = ("mean", "max", "median")


@dataclass
class ProjectionSet:
    """Gaussian projection weights and biases, reproducible from the seed."""

    weight: np.ndarray  # (d_aug, n_projectors)
    bias: np.ndarray  # (n_projectors,)
    seed: int
    distribution: str = "gaussian"

    @property
    def input_dim(self) -> int:
        return self.weight.shape[0]

    @property
    def num_projectors(self) -> int:
        return self.weight.shape[1]


@dataclass
class ScoreVector:
    """Aggregated per-node hash scores."""

    scores: np.ndarray  # (N,)
    per_projector: np.ndarray | None  # (N, n_projectors) when retained
    alpha_used: float


@dataclass
class NodeOrder:
    """Permutation of node ids sorted by ascending score, ties by node id."""

    order: np.ndarray  # position -> node id
    rank: np.ndarray  # node id -> position

    @property
    def size(self) -> int:
        return self.order.size

    @classmethod
    def identity(cls, n: int) -> "NodeOrder":
        ids = np.arange(n, dtype=np.int64)
        return cls(order=ids, rank=ids.copy())


def sample_projections(d_aug: int, n_projectors: int, seed: int) -> ProjectionSet:
    """Draw a (d_aug, n_projectors) N(0,1) weight matrix and bias vector.

    The same (d_aug, n_projectors, seed) triple reproduces bit-identical
    values.
    """
    if d_aug < 1 or n_projectors < 1:
        raise InvalidDimension(
            f"need d_aug >= 1 and n_projectors >= 1, got ({d_aug}, {n_projectors})"
        )
    rng = np.random.default_rng(seed)
    weight = rng.standard_normal((d_aug, n_projectors))
    bias = rng.standard_normal(n_projectors)
    return ProjectionSet(weight=weight, bias=bias, seed=int(seed))


def hash_scores(
    features: np.ndarray | None,
    structure: sp.spmatrix | None,
    alpha: float,
    projections: ProjectionSet,
    aggregate: str = "mean",
    keep_per_projector: bool = False,
) -> ScoreVector:
    """Score rows of the virtual blend ``(1-alpha)*features ++ alpha*structure``.

    ``features`` is a dense (N, d) block or None; ``structure`` is a sparse
    (N, m) block or None (at least one must be present). The projection weight
    matrix must have d + m rows: the first d rows multiply the feature block,
    the remaining m rows the structure block.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if aggregate not in AGGREGATES:
        raise ValueError(f"aggregate must be one of {AGGREGATES}, got {aggregate!r}")
    d = 0 if features is None else features.shape[1]
    m = 0 if structure is None else structure.shape[1]
    if d + m == 0:
        raise InvalidDimension("need at least one of features/structure")
    if projections.input_dim != d + m:
        raise DimensionMismatch(
            f"projection rows ({projections.input_dim}) != feature dim + "
            f"structure dim ({d} + {m})"
        )
    n = features.shape[0] if features is not None else structure.shape[0]
    per = np.zeros((n, projections.num_projectors))
    # A zero-weighted block contributes exact zeros; skip its product.
    if features is not None and d and alpha < 1.0:
        per += (1.0 - alpha) * (features @ projections.weight[:d])
    if structure is not None and m and alpha > 0.0:
        per += alpha * np.asarray(structure @ projections.weight[d:])
    per += projections.bias

    if aggregate == "mean":
        scores = per.mean(axis=1)
    elif aggregate == "max":
        scores = per.max(axis=1)
    else:
        scores = np.median(per, axis=1)
    scores = np.ascontiguousarray(scores, dtype=np.float64)
    assert scores.shape == (n,)
    return ScoreVector(
        scores=scores,
        per_projector=per if keep_per_projector else None,
        alpha_used=float(alpha),
    )


def project_scores(
    g: Graph,
    alpha: float,
    projections: ProjectionSet,
    aggregate: str = "mean",
    keep_per_projector: bool = False,
) -> ScoreVector:
    """Hash a graph's nodes using its feature rows and adjacency rows."""
    return hash_scores(
        g.features, g.adjacency, alpha, projections, aggregate, keep_per_projector
    )


def build_order(scores: ScoreVector | np.ndarray) -> NodeOrder:
    """Sort nodes by ascending score; equal scores keep ascending node id."""
    values = scores.scores if isinstance(scores, ScoreVector) else np.asarray(scores)
    order = np.argsort(values, kind="stable").astype(np.int64)
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size, dtype=np.int64)
    return NodeOrder(order=order, rank=rank)


def zscore_columns(x: np.ndarray) -> np.ndarray:
    """Per-column standardization; constant columns become all zeros."""
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    out = x - mean
    nonzero = std > 0
    out[:, nonzero] /= std[nonzero]
    out[:, ~nonzero] = 0.0
    return out
