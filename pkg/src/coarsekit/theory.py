"""Executable validators for the probabilistic guarantees of the pipeline.

Three checks, each pairing a closed-form bound with a Monte-Carlo estimate:

* load balance: after random rightward merges down to k supernodes, the
  largest supernode stays under n/k + n(log k + c)/k with probability at
  least 1 - exp(-c). The validator drives the production merge scheduler,
  so it doubles as a regression test of that machinery.
* projection proximity: for the sum-of-projections statistic, the gap
  h(x) - h(y) is Gaussian with variance ell * ||x - y||^2, giving an exact
  erf law for |h(x) - h(y)| <= eps.
* separation: the probability that a distant point lands between two close
  points after projection is bounded by the normal CDF of the distance
  ratio over sqrt(ell).

Pass criteria allow three binomial standard errors around the analytic
value: one-sided for the two inequalities, two-sided for the erf equality.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf, ndtr

from .coarsen import build_schedule, partition_at_ratio
from .exceptions import DegenerateInput, InvalidParams, ZeroDistance
from .lsh import NodeOrder

__all__ = [
    "BoundCheck",
    "load_balance_bound",
    "validate_load_balance",
    "proximity_probability",
    "validate_proximity",
    "proximity_curve",
    "separation_bound",
    "validate_separation",
]

_MAX_GAUSS_BLOCK = 4_000_000  # cap on elements drawn per chunk


@dataclass
class BoundCheck:
    """Outcome of one Monte-Carlo validation run."""

    name: str
    empirical: float
    analytic: float
    trials: int
    passed: bool
    tolerance: float
    params: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)


def _binomial_sigma(p: float, trials: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / trials)


def load_balance_bound(n: int, k: int, c: float) -> float:
    """Analytic cap on the largest supernode: n/k + n(log k + c)/k."""
    if not 1 <= k <= n or c <= 0:
        raise InvalidParams(f"need 1 <= k <= n and c > 0, got n={n}, k={k}, c={c}")
    return n / k + n * (math.log(k) + c) / k


def validate_load_balance(
    n: int, k: int, c: float, trials: int, seed: int = 0
) -> BoundCheck:
    """Estimate Pr[max supernode size <= bound] with the real merge scheduler.

    Each trial builds a fresh schedule over n ring positions down to k
    supernodes and measures the largest resulting size. Passes when the
    empirical probability is no more than three binomial standard errors
    below 1 - exp(-c).
    """
    if trials < 1:
        raise InvalidParams(f"trials must be >= 1, got {trials}")
    bound = load_balance_bound(n, k, c)
    analytic = 1.0 - math.exp(-c)
    master = np.random.default_rng(seed)
    trial_seeds = master.integers(0, 2**63, size=trials)
    order = NodeOrder.identity(n)
    ratio = k / n
    hits = 0
    max_sizes = np.empty(trials, dtype=np.int64)
    for i in range(trials):
        schedule = build_schedule(order, ratio, int(trial_seeds[i]))
        sizes = partition_at_ratio(schedule, ratio).sizes
        max_sizes[i] = sizes.max()
        if max_sizes[i] <= bound:
            hits += 1
    empirical = hits / trials
    sigma = _binomial_sigma(analytic, trials)
    tolerance = 3.0 * sigma
    return BoundCheck(
        name="load-balance",
        empirical=empirical,
        analytic=analytic,
        trials=trials,
        passed=empirical >= analytic - tolerance,
        tolerance=tolerance,
        params={"n": n, "k": k, "c": c, "bound": bound},
        details={
            "max_size_mean": float(max_sizes.mean()),
            "max_size_worst": int(max_sizes.max()),
        },
    )


def proximity_probability(epsilon: float, n_projectors: int, dist: float) -> float:
    """Exact probability that |h(x) - h(y)| <= epsilon under Gaussian
    projections: erf(epsilon / (sqrt(2 * ell) * ||x - y||))."""
    if epsilon < 0 or n_projectors < 1:
        raise InvalidParams(
            f"need epsilon >= 0 and n_projectors >= 1, got ({epsilon}, {n_projectors})"
        )
    if dist < 0:
        raise InvalidParams(f"dist must be >= 0, got {dist}")
    if dist == 0.0:
        warnings.warn(
            "zero distance: proximity probability is 1 by continuity",
            stacklevel=2,
        )
        return 1.0
    return float(erf(epsilon / (math.sqrt(2.0 * n_projectors) * dist)))


def _projection_sums(rng, trials: int, n_projectors: int, dim: int) -> np.ndarray:
    """Sum of ``n_projectors`` iid standard-Gaussian direction vectors per
    trial, drawn in bounded chunks. Shape (trials, dim)."""
    out = np.empty((trials, dim))
    chunk = max(1, _MAX_GAUSS_BLOCK // (n_projectors * dim))
    start = 0
    while start < trials:
        stop = min(start + chunk, trials)
        block = rng.standard_normal((stop - start, n_projectors, dim))
        out[start:stop] = block.sum(axis=1)
        start = stop
    return out


def validate_proximity(
    x: np.ndarray,
    y: np.ndarray,
    n_projectors: int,
    epsilon: float,
    trials: int,
    seed: int = 0,
) -> BoundCheck:
    """Compare the empirical |h(x) - h(y)| <= eps frequency to the erf law.

    Each trial draws an independent set of Gaussian projections. Passes when
    the empirical frequency is within max(0.01, 3 sigma) of the analytic
    value; the sample variance of the gap is reported against its expected
    value ell * ||x - y||^2.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise DegenerateInput("x and y must have the same dimension")
    z = x - y
    dist = float(np.linalg.norm(z))
    if dist == 0.0:
        raise DegenerateInput("x and y must differ")
    analytic = proximity_probability(epsilon, n_projectors, dist)
    rng = np.random.default_rng(seed)
    sums = _projection_sums(rng, trials, n_projectors, z.size)
    gaps = sums @ z
    empirical = float(np.mean(np.abs(gaps) <= epsilon))
    sample_var = float(np.var(gaps, ddof=1))
    expected_var = n_projectors * dist**2
    tolerance = max(0.01, 3.0 * _binomial_sigma(analytic, trials))
    return BoundCheck(
        name="proximity",
        empirical=empirical,
        analytic=analytic,
        trials=trials,
        passed=abs(empirical - analytic) <= tolerance,
        tolerance=tolerance,
        params={
            "epsilon": epsilon,
            "n_projectors": n_projectors,
            "distance": dist,
        },
        details={
            "sample_variance": sample_var,
            "expected_variance": expected_var,
            "variance_rel_err": abs(sample_var - expected_var) / expected_var,
        },
    )


def proximity_curve(
    x: np.ndarray,
    y: np.ndarray,
    n_projectors: int,
    epsilons,
    trials: int,
    seed: int = 0,
):
    """(epsilon, empirical, analytic) rows over a shared set of draws."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    z = x - y
    dist = float(np.linalg.norm(z))
    if dist == 0.0:
        raise DegenerateInput("x and y must differ")
    rng = np.random.default_rng(seed)
    gaps = np.abs(_projection_sums(rng, trials, n_projectors, z.size) @ z)
    rows = []
    for eps in epsilons:
        rows.append(
            (
                float(eps),
                float(np.mean(gaps <= eps)),
                proximity_probability(float(eps), n_projectors, dist),
            )
        )
    return rows


def separation_bound(
    x: np.ndarray, y: np.ndarray, z: np.ndarray, n_projectors: int
) -> float:
    """Cap on Pr[h(x) < h(z) < h(y)] for a distant z:
    Phi(||x - y|| / (sqrt(ell) * ||x - z||))."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    z = np.asarray(z, dtype=np.float64).ravel()
    if n_projectors < 1:
        raise InvalidParams(f"n_projectors must be >= 1, got {n_projectors}")
    dist_xz = float(np.linalg.norm(x - z))
    if dist_xz == 0.0:
        raise ZeroDistance("x and z must differ")
    dist_xy = float(np.linalg.norm(x - y))
    return float(ndtr(dist_xy / (math.sqrt(n_projectors) * dist_xz)))


def validate_separation(
    x: np.ndarray,
    y: np.ndarray,
    z: np.ndarray,
    n_projectors: int,
    trials: int,
    seed: int = 0,
) -> BoundCheck:
    """One-sided check that interruptions stay under the analytic cap.

    Counts how often the projection of z lands strictly between those of x
    and y; passes when the frequency does not exceed the bound by more than
    three binomial standard errors.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    z = np.asarray(z, dtype=np.float64).ravel()
    analytic = separation_bound(x, y, z, n_projectors)
    rng = np.random.default_rng(seed)
    sums = _projection_sums(rng, trials, n_projectors, x.size)
    hx = sums @ x
    hy = sums @ y
    hz = sums @ z
    empirical = float(np.mean((hx < hz) & (hz < hy)))
    sigma = _binomial_sigma(analytic, trials)
    tolerance = 3.0 * sigma
    return BoundCheck(
        name="separation",
        empirical=empirical,
        analytic=analytic,
        trials=trials,
        passed=empirical <= analytic + tolerance,
        tolerance=tolerance,
        params={
            "n_projectors": n_projectors,
            "distance_ratio": float(
                np.linalg.norm(x - y) / np.linalg.norm(x - z)
            ),
        },
    )
