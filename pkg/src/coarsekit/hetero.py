"""Type-isolated coarsening of heterogeneous graphs.

Each node type gets its own independent hashing pass and merge schedule, so
supernodes can never mix types. Relations are then re-expressed between
supernodes by accumulating the original edge weights through the two types'
assignment maps. Per-type seeds are derived from the type name, so adding a
type leaves every other type's output untouched.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .coarsen import (
    CoarseningMatrix,
    build_schedule,
    majority_vote,
    partition_at_ratio,
)
from .exceptions import (
    EmptyType,
    InvalidGraph,
    InvalidRatio,
    MissingTargetLabels,
    UnknownType,
)
from .lsh import build_order, hash_scores, sample_projections

__all__ = [
    "HeteroGraph",
    "HeteroCoarsenedGraph",
    "TypeInputs",
    "type_features",
    "coarsen_hetero",
    "HeteroCoarsener",
]


@dataclass
class HeteroGraph:
    """Typed node sets plus typed (possibly bipartite) edge relations.

    node_types : type names, in declaration order
    counts     : type name -> node count
    features   : type name -> (|V_t|, d_t) array or None (dims may differ)
    relations  : (src_type, relation, dst_type) -> sparse |V_src| x |V_dst|
    target_type / target_labels : the labeled type driving majority votes
    """

    node_types: list[str]
    counts: dict[str, int]
    features: dict[str, np.ndarray | None]
    relations: dict[tuple[str, str, str], sp.csr_matrix]
    target_type: str
    target_labels: np.ndarray | None = None

    def __post_init__(self):
        for t in self.node_types:
            if t not in self.counts:
                raise InvalidGraph(f"type {t!r} has no declared count")
        if self.target_type not in self.counts:
            raise UnknownType(f"target type {self.target_type!r} is not declared")
        for t, x in self.features.items():
            if x is not None and x.shape[0] != self.counts[t]:
                raise InvalidGraph(
                    f"type {t!r}: feature rows {x.shape[0]} != count {self.counts[t]}"
                )
        for (src, rel, dst), mat in self.relations.items():
            if src not in self.counts or dst not in self.counts:
                raise UnknownType(f"relation ({src}, {rel}, {dst}) uses unknown type")
            expected = (self.counts[src], self.counts[dst])
            if mat.shape != expected:
                raise InvalidGraph(
                    f"relation ({src}, {rel}, {dst}): shape {mat.shape} != {expected}"
                )
        if self.target_labels is not None:
            self.target_labels = np.asarray(self.target_labels, dtype=np.int64)
            if self.target_labels.shape != (self.counts[self.target_type],):
                raise InvalidGraph("target label count must match the target type")

    def num_nodes(self, t: str) -> int:
        if t not in self.counts:
            raise UnknownType(f"unknown node type {t!r}")
        return self.counts[t]


class TypeInputs(NamedTuple):
    """Hashing inputs for one node type: dense features, sparse structure,
    and the blend weight those two blocks should be combined with."""

    features: np.ndarray | None
    structure: sp.csr_matrix | None
    alpha: float


@dataclass
class HeteroCoarsenedGraph:
    """Per-type partitions, features, labels, and coarsened relations."""

    node_types: list[str]
    partitions: dict[str, CoarseningMatrix]
    features: dict[str, np.ndarray | None]
    relations: dict[tuple[str, str, str], sp.csr_matrix]
    target_type: str
    target_labels: np.ndarray | None

    def num_supernodes(self, t: str) -> int:
        return self.partitions[t].num_supernodes

    def purity(self) -> float:
        """Percentage of supernodes whose members share one node type.

        Merges never cross types, so this reads 100.0 whenever the output is
        consistent; it recomputes the figure from the assignments instead of
        asserting it.
        """
        total = 0
        pure = 0
        for t in self.node_types:
            cm = self.partitions[t]
            member_types = {}
            for node, supernode in enumerate(cm.assignment):
                member_types.setdefault(int(supernode), set()).add(t)
            total += cm.num_supernodes
            pure += sum(1 for kinds in member_types.values() if len(kinds) == 1)
        return 100.0 * pure / total if total else 100.0


def _within_type_adjacency(h: HeteroGraph, t: str) -> sp.csr_matrix | None:
    mats = [m for (s, _, d), m in h.relations.items() if s == t and d == t]
    if not mats:
        return None
    acc = mats[0].copy()
    for m in mats[1:]:
        acc = acc + m
    sym = ((acc + acc.T) * 0.5).tocsr()
    sym.setdiag(0.0)
    sym.eliminate_zeros()
    return sym


def _incidence_rows(h: HeteroGraph, t: str) -> sp.csr_matrix | None:
    blocks = []
    for (src, _, dst), mat in sorted(h.relations.items()):
        if src == t:
            blocks.append(mat)
        if dst == t:
            blocks.append(mat.T.tocsr())
    if not blocks:
        return None
    return sp.hstack(blocks, format="csr")


def type_features(h: HeteroGraph, t: str, alpha=None) -> TypeInputs:
    """Assemble the hashing inputs for one node type.

    Featureless types fall back to their concatenated incidence rows across
    every touching relation, hashed purely as structure (alpha = 1). Types
    with features but no same-type relation hash features only (alpha = 0).
    When both blocks exist, ``alpha`` wins if given; otherwise the target
    type's cross-label edge fraction is used, or an even 0.5 blend.
    """
    if t not in h.counts:
        raise UnknownType(f"unknown node type {t!r}")
    x = h.features.get(t)
    a = _within_type_adjacency(h, t)
    if x is None:
        structure = _incidence_rows(h, t)
        if structure is None:
            raise InvalidGraph(
                f"type {t!r} has neither features nor any touching relation"
            )
        return TypeInputs(features=None, structure=structure, alpha=1.0)
    if a is None:
        return TypeInputs(features=x, structure=None, alpha=0.0)
    if alpha is not None:
        return TypeInputs(features=x, structure=a, alpha=float(alpha))
    if t == h.target_type and h.target_labels is not None and a.nnz:
        rows, cols = sp.triu(a, k=1).nonzero()
        if rows.size:
            cross = h.target_labels[rows] != h.target_labels[cols]
            return TypeInputs(x, a, float(np.count_nonzero(cross)) / rows.size)
    return TypeInputs(features=x, structure=a, alpha=0.5)


def _type_seed(seed: int, type_name: str) -> int:
    digest = hashlib.blake2s(type_name.encode("utf-8"), digest_size=8).digest()
    return (int(seed) ^ int.from_bytes(digest, "big")) & (2**63 - 1)


def coarsen_hetero(
    h: HeteroGraph,
    eta: float,
    seed: int = 0,
    eta_by_type: dict[str, float] | None = None,
    alpha: float | None = None,
    n_projectors: int = 10,
    aggregate: str = "mean",
) -> HeteroCoarsenedGraph:
    """Coarsen each node type independently, then re-wire every relation.

    Per type t the target supernode count is max(1, round(eta_t * |V_t|)),
    with eta_t taken from ``eta_by_type`` when present. The coarsened
    relation for (t1, rel, t2) accumulates original edge weights between
    member sets, so each relation's total weight is conserved exactly.
    """
    if not 0.0 < eta <= 1.0:
        raise InvalidRatio(f"eta must lie in (0, 1], got {eta}")
    overrides = dict(eta_by_type or {})
    for t, value in overrides.items():
        if t not in h.counts:
            raise UnknownType(f"eta override for unknown type {t!r}")
        if not 0.0 < value <= 1.0:
            raise InvalidRatio(f"eta for type {t!r} must lie in (0, 1], got {value}")
    if h.target_labels is None:
        raise MissingTargetLabels(
            f"target type {h.target_type!r} has no labels to majority-vote"
        )

    partitions: dict[str, CoarseningMatrix] = {}
    coarse_features: dict[str, np.ndarray | None] = {}
    for t in h.node_types:
        count = h.counts[t]
        if count == 0:
            raise EmptyType(f"node type {t!r} has zero nodes")
        eta_t = overrides.get(t, eta)
        inputs = type_features(h, t, alpha=alpha)
        d = 0 if inputs.features is None else inputs.features.shape[1]
        m = 0 if inputs.structure is None else inputs.structure.shape[1]
        type_seed = _type_seed(seed, t)
        projections = sample_projections(d + m, n_projectors, type_seed)
        scores = hash_scores(
            inputs.features, inputs.structure, inputs.alpha, projections, aggregate
        )
        order = build_order(scores)
        schedule = build_schedule(order, eta_t, type_seed)
        cm = partition_at_ratio(schedule, eta_t)
        partitions[t] = cm
        x = h.features.get(t)
        if x is None:
            coarse_features[t] = None
        else:
            membership = cm.membership_matrix()
            coarse_features[t] = np.asarray(membership.T @ x) / cm.sizes[:, None]

    coarse_relations = {}
    for key, mat in h.relations.items():
        src, _, dst = key
        c_src = partitions[src].membership_matrix()
        c_dst = partitions[dst].membership_matrix()
        coarse = (c_src.T @ mat @ c_dst).tocsr()
        coarse.sort_indices()
        coarse_relations[key] = coarse

    target_cm = partitions[h.target_type]
    labels = majority_vote(
        target_cm.assignment, h.target_labels, target_cm.num_supernodes
    )
    return HeteroCoarsenedGraph(
        node_types=list(h.node_types),
        partitions=partitions,
        features=coarse_features,
        relations=coarse_relations,
        target_type=h.target_type,
        target_labels=labels,
    )


class HeteroCoarsener(BaseEstimator):
    """Estimator wrapper around :func:`coarsen_hetero`.

    Parameters mirror the function; ``fit`` performs the per-type passes and
    stores the result, ``transform`` returns it.
    """

    def __init__(
        self,
        eta=0.5,
        eta_by_type=None,
        alpha=None,
        n_projectors=10,
        aggregate="mean",
        random_state=0,
    ):
        self.eta = eta
        self.eta_by_type = eta_by_type
        self.alpha = alpha
        self.n_projectors = n_projectors
        self.aggregate = aggregate
        self.random_state = random_state

    def fit(self, H: HeteroGraph, y=None):
        self.result_ = coarsen_hetero(
            H,
            eta=self.eta,
            seed=int(self.random_state),
            eta_by_type=self.eta_by_type,
            alpha=self.alpha,
            n_projectors=int(self.n_projectors),
            aggregate=self.aggregate,
        )
        return self

    def transform(self, H: HeteroGraph = None) -> HeteroCoarsenedGraph:
        check_is_fitted(self, "result_")
        return self.result_

    def fit_transform(self, H: HeteroGraph, y=None) -> HeteroCoarsenedGraph:
        return self.fit(H).transform()
