"""Adaptive multi-resolution graph coarsening via hashing.

One hashing pass over a graph yields a sorted node ring and a seeded merge
schedule; every coarsening ratio is then a cheap prefix read of that
schedule. Heterogeneous graphs are coarsened per node type so supernodes
never mix types. Spectral fidelity metrics and Monte-Carlo validators for
the method's probabilistic guarantees are included.
"""

from .coarsen import (
    AdaptiveCoarsener,
    CoarsenedGraph,
    CoarseningMatrix,
    MergeSchedule,
    build_schedule,
    coarsen_graph,
    majority_vote,
    partition_at_ratio,
)
from .graph import Graph, Laplacian, build_laplacian, heterophily_factor
from .hetero import (
    HeteroCoarsenedGraph,
    HeteroCoarsener,
    HeteroGraph,
    coarsen_hetero,
    type_features,
)
from .lsh import (
    NodeOrder,
    ProjectionSet,
    ScoreVector,
    build_order,
    hash_scores,
    project_scores,
    sample_projections,
)
from .spectral import (
    LiftedLaplacian,
    SpectralReport,
    eigenvalues_smallest,
    hyperbolic_error,
    lift_laplacian,
    reconstruction_error,
    ree,
    spectral_report,
)
from .synthetic import preferential_attachment_graph, random_graph
from .theory import (
    BoundCheck,
    load_balance_bound,
    proximity_probability,
    separation_bound,
    validate_load_balance,
    validate_proximity,
    validate_separation,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptiveCoarsener",
    "BoundCheck",
    "CoarsenedGraph",
    "CoarseningMatrix",
    "Graph",
    "HeteroCoarsenedGraph",
    "HeteroCoarsener",
    "HeteroGraph",
    "Laplacian",
    "LiftedLaplacian",
    "MergeSchedule",
    "NodeOrder",
    "ProjectionSet",
    "ScoreVector",
    "SpectralReport",
    "build_laplacian",
    "build_order",
    "build_schedule",
    "coarsen_graph",
    "coarsen_hetero",
    "eigenvalues_smallest",
    "hash_scores",
    "heterophily_factor",
    "hyperbolic_error",
    "lift_laplacian",
    "load_balance_bound",
    "majority_vote",
    "partition_at_ratio",
    "preferential_attachment_graph",
    "project_scores",
    "proximity_probability",
    "random_graph",
    "reconstruction_error",
    "ree",
    "sample_projections",
    "separation_bound",
    "spectral_report",
    "type_features",
    "validate_load_balance",
    "validate_proximity",
    "validate_separation",
]
