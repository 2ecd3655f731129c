"""Spectral fidelity metrics between a graph and its coarsened version.

Three complementary views: relative error of the low (or high) end of the
Laplacian spectrum, a feature-weighted hyperbolic discrepancy against the
lifted coarse Laplacian, and the squared Frobenius reconstruction error.
The lifted Laplacian expands the coarse one back to original dimensions by
block-replicating entries over supernode member sets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg

from .coarsen import CoarsenedGraph, CoarseningMatrix
from .exceptions import (
    AllZeroEigenvalues,
    DegenerateFeatures,
    InvalidParams,
    TooLarge,
)
from .graph import Graph, Laplacian, build_laplacian

__all__ = [
    "LiftedLaplacian",
    "SpectralReport",
    "ReeResult",
    "eigenvalues_smallest",
    "eigenvalues_largest",
    "lift_laplacian",
    "ree",
    "hyperbolic_error",
    "reconstruction_error",
    "spectral_report",
]

ZERO_EIGENVALUE_TOL = 1e-8
TRACE_TOL = 1e-12
DEFAULT_DENSE_LIMIT = 4000


def _as_matrix(m):
    return m.matrix if isinstance(m, Laplacian) else m


def _dense(m) -> np.ndarray:
    m = _as_matrix(m)
    return m.toarray() if sp.issparse(m) else np.asarray(m, dtype=np.float64)


@dataclass
class LiftedLaplacian:
    """Coarse Laplacian expanded to original node dimensions (C L_c C^T)."""

    matrix: np.ndarray
    partition: CoarseningMatrix
    coarse_laplacian: sp.csr_matrix


@dataclass
class ReeResult:
    value: float
    k_used: int
    skipped: int


@dataclass
class SpectralReport:
    ree: float
    he: float
    rce_raw: float
    rce_log10: float
    k_used: int
    skipped_eigenvalues: int


def _eig_subset(matrix, lo: int, hi: int, dense_limit: int, iterative: bool):
    matrix = _as_matrix(matrix)
    n = matrix.shape[0]
    if hi >= n:
        raise InvalidParams(f"requested eigenvalue index {hi} for size {n}")
    if n > dense_limit:
        if not iterative:
            raise TooLarge(
                f"matrix size {n} exceeds the dense eigensolver limit "
                f"{dense_limit}; enable the iterative solver"
            )
        k = hi - lo + 1
        if k >= n:  # ARPACK needs k < n
            return np.sort(np.linalg.eigvalsh(_dense(matrix)))[lo : hi + 1]
        which = "SA" if lo == 0 else "LA"
        vals = sp.linalg.eigsh(
            sp.csr_matrix(matrix), k=k, which=which, return_eigenvectors=False
        )
        return np.sort(np.real(vals))
    dense = _dense(matrix)
    return scipy.linalg.eigh(dense, eigvals_only=True, subset_by_index=(lo, hi))


def eigenvalues_smallest(
    L,
    k: int,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
    iterative: bool = False,
) -> np.ndarray:
    """The k smallest eigenvalues of a symmetric matrix, ascending."""
    if k < 1:
        raise InvalidParams(f"k must be >= 1, got {k}")
    return _eig_subset(L, 0, k - 1, dense_limit, iterative)


def eigenvalues_largest(
    L,
    k: int,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
    iterative: bool = False,
) -> np.ndarray:
    """The k largest eigenvalues, ascending."""
    if k < 1:
        raise InvalidParams(f"k must be >= 1, got {k}")
    n = _as_matrix(L).shape[0]
    return _eig_subset(L, n - k, n - 1, dense_limit, iterative)


def ree(
    L,
    L_c,
    k: int,
    end: str = "low",
    dense_limit: int = DEFAULT_DENSE_LIMIT,
    iterative: bool = False,
) -> ReeResult:
    """Mean relative eigenvalue error over the k compared eigenvalues.

    Eigenvalues of the original below ``ZERO_EIGENVALUE_TOL`` cannot anchor a
    relative error and are skipped; the skip count is reported. ``end``
    selects whether the k smallest or k largest eigenvalues are compared.
    """
    n_coarse = _as_matrix(L_c).shape[0]
    if k > n_coarse:
        raise InvalidParams(
            f"k = {k} exceeds the coarse matrix size {n_coarse}"
        )
    if end == "low":
        lam = eigenvalues_smallest(L, k, dense_limit, iterative)
        lam_c = eigenvalues_smallest(L_c, k, dense_limit, iterative)
    elif end == "high":
        lam = eigenvalues_largest(L, k, dense_limit, iterative)[::-1]
        lam_c = eigenvalues_largest(L_c, k, dense_limit, iterative)[::-1]
    else:
        raise InvalidParams(f"end must be 'low' or 'high', got {end!r}")
    keep = lam >= ZERO_EIGENVALUE_TOL
    k_used = int(np.count_nonzero(keep))
    if k_used == 0:
        raise AllZeroEigenvalues(
            f"all {k} reference eigenvalues are below {ZERO_EIGENVALUE_TOL}"
        )
    value = float(np.mean(np.abs(lam_c[keep] - lam[keep]) / lam[keep]))
    return ReeResult(value=value, k_used=k_used, skipped=k - k_used)


def lift_laplacian(
    partition: CoarseningMatrix, L_c, normalized: bool = False
) -> LiftedLaplacian:
    """Expand the coarse Laplacian back to original dimensions.

    With the binary membership matrix the lifted entry (i, j) is simply the
    coarse entry at (supernode(i), supernode(j)). The normalized variant
    scales memberships by 1/supernode-size instead.
    """
    coarse = sp.csr_matrix(_as_matrix(L_c))
    dense_c = coarse.toarray()
    pi = partition.assignment
    lifted = dense_c[np.ix_(pi, pi)]
    if normalized:
        inv = 1.0 / partition.sizes[pi]
        lifted = lifted * np.outer(inv, inv)
    return LiftedLaplacian(matrix=lifted, partition=partition, coarse_laplacian=coarse)


def hyperbolic_error(L, L_lift, X: np.ndarray) -> float:
    """arccosh-based discrepancy between L and the lifted Laplacian.

    Zero exactly when the lifted matrix equals L. Raises when either
    quadratic trace vanishes (features inside the Laplacian null space),
    which is reported rather than silently zeroed.
    """
    L = _as_matrix(L)
    lifted = L_lift.matrix if isinstance(L_lift, LiftedLaplacian) else np.asarray(L_lift)
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    lx = L @ X
    lift_x = lifted @ X
    trace_orig = float(np.sum(X * lx))
    trace_lift = float(np.sum(X * lift_x))
    if trace_orig <= TRACE_TOL or trace_lift <= TRACE_TOL:
        raise DegenerateFeatures(
            f"quadratic traces ({trace_orig:.3e}, {trace_lift:.3e}) too small; "
            "features lie in the Laplacian null space"
        )
    num = float(np.sum((lx - lift_x) ** 2)) * float(np.sum(X * X))
    arg = num / (2.0 * trace_orig * trace_lift) + 1.0
    # num >= 0 and both traces > 0, so arg >= 1 up to round-off.
    return float(np.arccosh(max(arg, 1.0)))


def reconstruction_error(L, L_lift) -> tuple[float, float]:
    """Squared Frobenius norm of L minus the lifted Laplacian, plus log10.

    The raw value can be astronomically large on big graphs, so both the raw
    number and its log10 (-inf at exact reconstruction) are returned.
    """
    L = sp.csr_matrix(_as_matrix(L))
    lifted = L_lift.matrix if isinstance(L_lift, LiftedLaplacian) else np.asarray(L_lift)
    diff = lifted.copy()
    coo = L.tocoo()
    diff[coo.row, coo.col] -= coo.data
    raw = float(np.einsum("ij,ij->", diff, diff))
    log10 = float(np.log10(raw)) if raw > 0.0 else float("-inf")
    return raw, log10


def spectral_report(
    g: Graph,
    coarse: CoarsenedGraph,
    k: int,
    ree_end: str = "low",
    dense_limit: int = DEFAULT_DENSE_LIMIT,
    iterative: bool = False,
    normalized_lift: bool = False,
) -> SpectralReport:
    """Compute all three fidelity metrics for one coarsening."""
    if g.num_nodes > dense_limit and not iterative:
        raise TooLarge(
            f"graph size {g.num_nodes} exceeds the dense limit {dense_limit}; "
            "enable the iterative solver"
        )
    lap = build_laplacian(g).matrix
    lap_c = build_laplacian(coarse.to_graph()).matrix
    ree_result = ree(lap, lap_c, k, ree_end, dense_limit, iterative)
    lifted = lift_laplacian(coarse.provenance, lap_c, normalized=normalized_lift)
    he = hyperbolic_error(lap, lifted, g.features)
    rce_raw, rce_log10 = reconstruction_error(lap, lifted)
    return SpectralReport(
        ree=ree_result.value,
        he=he,
        rce_raw=rce_raw,
        rce_log10=rce_log10,
        k_used=ree_result.k_used,
        skipped_eigenvalues=ree_result.skipped,
    )
