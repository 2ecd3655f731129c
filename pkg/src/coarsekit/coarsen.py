"""Consistent-hashing merge schedule and multi-resolution graph coarsening.

Sorted nodes are laid out on a ring, one supernode per position. Each merge
step samples a live supernode uniformly and absorbs its clockwise neighbor,
so after t merges the supernodes are exactly the contiguous arcs between the
surviving "head" positions. One schedule therefore answers every coarsening
ratio down to the ratio it was built for: the partition at ratio r is read
off the first N - n_target removed heads, no re-hashing involved.
"""

from __future__ import annotations

import math
import warnings
from array import array
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .exceptions import InvalidRatio, RatioBelowSchedule, SizeMismatch
from .graph import Graph, heterophily_factor
from .lsh import (
    AGGREGATES,
    NodeOrder,
    build_order,
    hash_scores,
    sample_projections,
    zscore_columns,
)

__all__ = [
    "MergeSchedule",
    "CoarseningMatrix",
    "CoarsenedGraph",
    "build_schedule",
    "partition_at_ratio",
    "coarsen_graph",
    "majority_vote",
    "AdaptiveCoarsener",
]


_DENSE_VOTE_CELLS = 50_000_000  # (supernode, class) table budget for voting


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def target_supernodes(ratio: float, n: int) -> int:
    """Supernode count for a ratio: max(1, round(ratio * n)), half rounds up."""
    return max(1, _round_half_up(ratio * n))


@dataclass
class MergeSchedule:
    """Deterministic sequence of rightward merges over a sorted node ring.

    ``left_heads[t]`` is the ring position (in sorted order) of the supernode
    sampled at step t; ``removed_heads[t]`` is the head position of the
    clockwise neighbor it absorbed. Replaying a prefix of ``removed_heads``
    yields the partition at any ratio >= ``min_ratio``.
    """

    base_order: NodeOrder
    min_ratio: float
    seed: int
    left_heads: np.ndarray
    removed_heads: np.ndarray
    checkpoints: dict = field(default_factory=dict)  # n_target -> CoarseningMatrix

    @property
    def num_nodes(self) -> int:
        return self.base_order.size

    @property
    def num_merges(self) -> int:
        return self.removed_heads.size

    @property
    def merges(self):
        """Iterate (step, left_supernode_position) pairs."""
        return enumerate(self.left_heads)


@dataclass
class CoarseningMatrix:
    """Node-to-supernode assignment realizing a binary partition matrix.

    Row-simple by construction: ``assignment[v]`` is the single supernode of
    node v, so the implied {0,1} matrix has exactly one 1 per row, mutually
    orthogonal columns, and no empty supernode.
    """

    assignment: np.ndarray  # (N,) int64, values in [0, num_supernodes)
    num_supernodes: int
    sizes: np.ndarray  # (num_supernodes,) int64, all >= 1

    def __post_init__(self):
        self.assignment = np.asarray(self.assignment, dtype=np.int64)
        self.sizes = np.asarray(self.sizes, dtype=np.int64)
        if self.sizes.shape != (self.num_supernodes,):
            raise SizeMismatch("sizes length must equal num_supernodes")
        if self.sizes.min(initial=1) < 1:
            raise SizeMismatch("every supernode must contain at least one node")
        if int(self.sizes.sum()) != self.assignment.size:
            raise SizeMismatch("sizes must sum to the node count")

    @property
    def num_nodes(self) -> int:
        return self.assignment.size

    @classmethod
    def identity(cls, n: int) -> "CoarseningMatrix":
        return cls(
            assignment=np.arange(n, dtype=np.int64),
            num_supernodes=n,
            sizes=np.ones(n, dtype=np.int64),
        )

    @classmethod
    def from_assignment(cls, assignment) -> "CoarseningMatrix":
        assignment = np.asarray(assignment, dtype=np.int64)
        n_super = int(assignment.max()) + 1 if assignment.size else 0
        sizes = np.bincount(assignment, minlength=n_super)
        return cls(assignment=assignment, num_supernodes=n_super, sizes=sizes)

    def membership_matrix(self) -> sp.csr_matrix:
        """The explicit {0,1} matrix with one column per supernode."""
        n = self.assignment.size
        return sp.csr_matrix(
            (
                np.ones(n, dtype=np.float64),
                (np.arange(n), self.assignment),
            ),
            shape=(n, self.num_supernodes),
        )


@dataclass
class CoarsenedGraph:
    """Supernode graph with averaged features and majority-vote labels.

    Inter-supernode weights accumulate all original edge weights between the
    two member sets; intra-supernode weight is kept off the adjacency in
    ``self_weights`` so the matrix stays a valid zero-diagonal adjacency.
    """

    adjacency: sp.csr_matrix  # (n, n) symmetric, zero diagonal
    self_weights: np.ndarray  # (n,) total intra-member edge weight
    features: np.ndarray  # (n, d)
    labels: np.ndarray | None
    provenance: CoarseningMatrix

    @property
    def num_supernodes(self) -> int:
        return self.adjacency.shape[0]

    def to_graph(self) -> Graph:
        """View as a plain graph (intra-supernode weight excluded)."""
        return Graph(adjacency=self.adjacency, features=self.features, labels=self.labels)


def build_schedule(order: NodeOrder, min_ratio: float, seed: int) -> MergeSchedule:
    """Run seeded rightward merges until ``min_ratio`` is reachable.

    At each step a live supernode is drawn uniformly and merged with its
    clockwise neighbor; the rightmost supernode wraps around to the leftmost.
    The same (order, min_ratio, seed) triple reproduces the exact sequence.
    """
    if not 0.0 < min_ratio <= 1.0:
        raise InvalidRatio(f"min_ratio must lie in (0, 1], got {min_ratio}")
    n = order.size
    n_floor = target_supernodes(min_ratio, n)
    n_merges = n - n_floor
    left = np.empty(n_merges, dtype=np.int64)
    removed = np.empty(n_merges, dtype=np.int64)
    if n_merges:
        rng = np.random.default_rng(seed)
        uniforms = rng.random(n_merges).tolist()
        # Ring bookkeeping: nxt[h] is the next live head clockwise; live/slot
        # give O(1) uniform sampling with swap-removal. Unboxed array('q')
        # storage keeps the hot loop cache-friendly at large n.
        nxt = array("q", range(1, n + 1))
        nxt[n - 1] = 0
        live = array("q", range(n))
        slot = array("q", range(n))
        m = n
        for t in range(n_merges):
            j = int(uniforms[t] * m)
            if j >= m:  # u = 1 - 2**-53 can round up at ties
                j = m - 1
            h = live[j]
            r = nxt[h]
            left[t] = h
            removed[t] = r
            nxt[h] = nxt[r]
            s = slot[r]
            last = live[m - 1]
            live[s] = last
            slot[last] = s
            m -= 1
    return MergeSchedule(
        base_order=order,
        min_ratio=float(min_ratio),
        seed=int(seed),
        left_heads=left,
        removed_heads=removed,
    )


def partition_at_ratio(schedule: MergeSchedule, ratio: float) -> CoarseningMatrix:
    """Extract the partition after exactly N - n_target merges.

    O(N) per call: surviving head positions are the full position set minus a
    prefix of ``removed_heads``; each supernode is the contiguous arc from one
    surviving head to the next. Supernode ids follow the smallest member node
    id, so the full-ratio partition is the identity assignment.
    """
    if not 0.0 < ratio <= 1.0:
        raise InvalidRatio(f"ratio must lie in (0, 1], got {ratio}")
    n = schedule.num_nodes
    n_target = target_supernodes(ratio, n)
    n_steps = n - n_target
    if n_steps > schedule.num_merges:
        raise RatioBelowSchedule(
            f"ratio {ratio} needs {n_steps} merges but the schedule stops at "
            f"{schedule.num_merges} (min_ratio {schedule.min_ratio})"
        )
    cached = schedule.checkpoints.get(n_target)
    if cached is not None:
        return cached

    is_head = np.ones(n, dtype=bool)
    is_head[schedule.removed_heads[:n_steps]] = False
    position_label = np.cumsum(is_head) - 1
    if not is_head[0]:
        # Positions before the first surviving head belong to the arc that
        # wraps past the end of the ring, i.e. the last supernode.
        position_label[position_label < 0] = n_target - 1
    assignment = np.empty(n, dtype=np.int64)
    assignment[schedule.base_order.order] = position_label
    sizes = np.bincount(position_label, minlength=n_target)
    # Renumber so supernode ids follow the smallest member node id (the
    # full-ratio partition then reads as the identity). Scattering node ids
    # in reverse makes the first (smallest) writer win.
    first_member = np.empty(n_target, dtype=np.int64)
    first_member[assignment[::-1]] = np.arange(n - 1, -1, -1, dtype=np.int64)
    by_first = np.argsort(first_member, kind="stable")
    new_of_old = np.empty(n_target, dtype=np.int64)
    new_of_old[by_first] = np.arange(n_target, dtype=np.int64)
    result = CoarseningMatrix(
        assignment=new_of_old[assignment],
        num_supernodes=n_target,
        sizes=sizes[by_first],
    )
    schedule.checkpoints[n_target] = result
    return result


def majority_vote(
    assignment: np.ndarray,
    labels: np.ndarray,
    n_supernodes: int,
    encoded: tuple[np.ndarray, np.ndarray] | None = None,
) -> np.ndarray:
    """Per-supernode majority label; ties go to the smallest label id.

    ``encoded`` optionally carries a precomputed (classes, inverse) pair from
    ``np.unique(labels, return_inverse=True)`` so repeated calls over the
    same label vector skip the sort.
    """
    classes, inverse = encoded if encoded is not None else np.unique(
        labels, return_inverse=True
    )
    k = classes.size
    if n_supernodes * k <= _DENSE_VOTE_CELLS:
        counts = np.bincount(
            assignment * k + inverse, minlength=n_supernodes * k
        ).reshape(n_supernodes, k)
        # argmax returns the first maximum, i.e. the smallest class id.
        return classes[np.argmax(counts, axis=1)]
    # Too many (supernode, class) cells for a dense table; sort instead.
    order = np.lexsort((inverse, assignment))
    a = assignment[order]
    lab = inverse[order]
    first = np.empty(a.size, dtype=bool)
    first[0] = True
    first[1:] = (a[1:] != a[:-1]) | (lab[1:] != lab[:-1])
    starts = np.flatnonzero(first)
    counts = np.diff(np.append(starts, a.size))
    group = a[starts]
    group_label = lab[starts]
    # Within one supernode labels are ascending, so after sorting by
    # (supernode, -count) the first row of each run wins ties correctly.
    sel = np.lexsort((group_label, -counts, group))
    group_s = group[sel]
    keep = np.empty(group_s.size, dtype=bool)
    keep[0] = True
    keep[1:] = group_s[1:] != group_s[:-1]
    out = np.empty(n_supernodes, dtype=np.int64)
    out[group_s[keep]] = group_label[sel][keep]
    return classes[out]


def coarsen_graph(g: Graph, c: CoarseningMatrix) -> CoarsenedGraph:
    """Assemble the supernode graph induced by a partition.

    Adjacency comes from one accumulation pass over the original edges,
    keyed by the endpoints' supernodes; features are the unweighted mean
    over members; labels, when present, the majority vote. Total edge weight
    is conserved: off-diagonal weight plus ``self_weights`` equals the
    original total.
    """
    if c.assignment.size != g.num_nodes:
        raise SizeMismatch(
            f"partition covers {c.assignment.size} nodes, graph has {g.num_nodes}"
        )
    n = c.num_supernodes
    erow, ecol, data = g.edges()  # each undirected edge once
    row_super = c.assignment[erow]
    col_super = c.assignment[ecol]
    intra = row_super == col_super
    self_weights = np.bincount(row_super[intra], weights=data[intra], minlength=n)
    cross = ~intra
    u = np.minimum(row_super[cross], col_super[cross])
    v = np.maximum(row_super[cross], col_super[cross])
    half = sp.coo_matrix((data[cross], (u, v)), shape=(n, n)).tocsr()
    # Mirroring the strictly-upper accumulation keeps the matrix exactly
    # symmetric; a direct (u, v)/(v, u) double pass would differ in ulps.
    coarse = half + half.T
    coarse.sort_indices()
    membership = c.membership_matrix()
    features = np.asarray(membership.T @ g.features) / c.sizes[:, None]
    labels = None
    if g.labels is not None:
        encoded = getattr(g, "_label_code_cache", None)
        if encoded is None:
            encoded = np.unique(g.labels, return_inverse=True)
            object.__setattr__(g, "_label_code_cache", encoded)
        labels = majority_vote(c.assignment, g.labels, c.num_supernodes, encoded)
    return CoarsenedGraph(
        adjacency=coarse,
        self_weights=self_weights,
        features=features,
        labels=labels,
        provenance=c,
    )


def resolve_alpha(g: Graph, alpha) -> float:
    """Resolve the feature/structure blend: 'auto' means the cross-label edge
    fraction when labels exist, otherwise an even 0.5 blend (with a warning)."""
    if alpha == "auto":
        if g.labels is not None and g.edge_count > 0:
            return heterophily_factor(g)
        warnings.warn(
            "alpha='auto' without labels (or edges); falling back to 0.5",
            stacklevel=3,
        )
        return 0.5
    value = float(alpha)
    if not 0.0 <= value <= 1.0:
        raise InvalidRatio(f"alpha must lie in [0, 1], got {value}")
    return value


class AdaptiveCoarsener(BaseEstimator):
    """One hashing pass, many coarsening ratios.

    ``fit`` projects, sorts, and builds the merge schedule once;
    ``partition_at`` / ``coarsen_at`` then answer any ratio >= ``min_ratio``
    without re-hashing. ``transform`` returns one coarsened graph per entry
    of ``ratios``.

    Parameters
    ----------
    ratios : sequence of floats in (0, 1], strictly descending
    alpha : 'auto' or float in [0, 1]; 'auto' uses the cross-label edge fraction
    n_projectors : number of random projections to aggregate
    aggregate : 'mean', 'max', or 'median'
    min_ratio : finest ratio the schedule must support; defaults to min(ratios)
    standardize : z-score feature columns before projecting
    random_state : seed for projections and merge sampling
    """

    def __init__(
        self,
        ratios=(0.5,),
        alpha="auto",
        n_projectors=10,
        aggregate="mean",
        min_ratio=None,
        standardize=False,
        random_state=0,
    ):
        self.ratios = ratios
        self.alpha = alpha
        self.n_projectors = n_projectors
        self.aggregate = aggregate
        self.min_ratio = min_ratio
        self.standardize = standardize
        self.random_state = random_state

    def _validated_ratios(self):
        ratios = [float(r) for r in self.ratios]
        if not ratios:
            raise InvalidRatio("ratios must be non-empty")
        for r in ratios:
            if not 0.0 < r <= 1.0:
                raise InvalidRatio(f"ratio {r} outside (0, 1]")
        if any(a <= b for a, b in zip(ratios, ratios[1:])):
            raise InvalidRatio(f"ratios must be strictly descending, got {ratios}")
        return ratios

    def fit(self, G: Graph, y=None):
        ratios = self._validated_ratios()
        if self.aggregate not in AGGREGATES:
            raise ValueError(f"aggregate must be one of {AGGREGATES}")
        self.alpha_ = resolve_alpha(G, self.alpha)
        features = G.features
        if self.standardize and features.shape[1]:
            features = zscore_columns(features)
        self.projections_ = sample_projections(
            features.shape[1] + G.num_nodes,
            int(self.n_projectors),
            int(self.random_state),
        )
        self.scores_ = hash_scores(
            features, G.adjacency, self.alpha_, self.projections_, self.aggregate
        )
        self.order_ = build_order(self.scores_)
        floor = min(ratios) if self.min_ratio is None else float(self.min_ratio)
        if floor > min(ratios):
            raise InvalidRatio(
                f"min_ratio {floor} coarser than the finest requested ratio"
            )
        self.schedule_ = build_schedule(self.order_, floor, int(self.random_state))
        self.n_nodes_ = G.num_nodes
        self._graph = G
        return self

    def partition_at(self, ratio: float) -> CoarseningMatrix:
        check_is_fitted(self, "schedule_")
        return partition_at_ratio(self.schedule_, ratio)

    def coarsen_at(self, ratio: float) -> CoarsenedGraph:
        check_is_fitted(self, "schedule_")
        return coarsen_graph(self._graph, self.partition_at(ratio))

    def transform(self, G: Graph = None) -> list[CoarsenedGraph]:
        """Coarsened graphs at every configured ratio, finest last."""
        check_is_fitted(self, "schedule_")
        if G is not None and G.num_nodes != self.n_nodes_:
            raise SizeMismatch(
                "transform input does not match the fitted graph's node count"
            )
        return [self.coarsen_at(r) for r in self._validated_ratios()]

    def fit_transform(self, G: Graph, y=None) -> list[CoarsenedGraph]:
        return self.fit(G).transform(G)
