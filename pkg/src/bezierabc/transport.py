"""Distances between equal-size point clouds.

A point cloud is an (n, M) array whose row order is significant: flattening
it row by row gives the aligned nM-vector.  Two distances matter here:

* ``euclidean_aligned`` — the plain Euclidean distance between aligned
  vectors (order-sensitive).
* ``wasserstein2`` — the exact 2-Wasserstein distance between the clouds
  viewed as uniform empirical measures, which for equal sizes reduces to a
  minimum-cost perfect matching over the squared-distance matrix:

      d_W(x, y)^2 = min_sigma (1/n) sum_i ||x_i - y_sigma(i)||^2

``wasserstein2_bruteforce`` minimizes over all n! permutations explicitly
and serves as the independent oracle for the assignment-based path.

For clouds with pairwise-distinct points there is a radius below which the
Wasserstein ball around x splits into disjoint Euclidean balls of radius
sqrt(n)*delta around the n! permuted copies of x;
:func:`permutation_separation_threshold` computes that radius, and
:func:`in_wasserstein_ball` provides the membership predicate the
decomposition is tested against.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

BRUTE_FORCE_MAX_POINTS = 8


def as_cloud(points) -> np.ndarray:
    """Coerce to an (n, M) float array, n >= 1."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"point cloud must be 2-D (n, M), got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"point cloud must be non-empty, got shape {arr.shape}")
    return arr


def _paired_clouds(x, y) -> tuple[np.ndarray, np.ndarray]:
    a, b = as_cloud(x), as_cloud(y)
    if a.shape != b.shape:
        raise ValueError(f"cloud shapes differ: {a.shape} vs {b.shape}")
    return a, b


def euclidean_aligned(x, y) -> float:
    """Euclidean distance between the aligned vectors of two clouds."""
    a, b = _paired_clouds(x, y)
    return float(np.sqrt(((a - b) ** 2).sum()))


def wasserstein2(x, y) -> float:
    """Exact 2-Wasserstein distance between equal-size clouds.

    Solved as a minimum-cost assignment on the full n x n squared-distance
    matrix; exact, and cheap for the cloud sizes used here (n <= a few
    hundred).
    """
    a, b = _paired_clouds(x, y)
    cost = cdist(a, b, metric="sqeuclidean")
    rows, cols = linear_sum_assignment(cost)
    # fsum: the matched costs add up independently of cloud ordering, so the
    # distance is exactly symmetric
    return math.sqrt(math.fsum(cost[rows, cols]) / a.shape[0])


def wasserstein2_bruteforce(x, y) -> float:
    """2-Wasserstein by explicit minimization over all n! permutations.

    Oracle for :func:`wasserstein2`; rejects n > 8.
    """
    a, b = _paired_clouds(x, y)
    n = a.shape[0]
    if n > BRUTE_FORCE_MAX_POINTS:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_POINTS}, got {n}")
    cost = cdist(a, b, metric="sqeuclidean")
    best = min(
        math.fsum(cost[range(n), perm]) for perm in itertools.permutations(range(n))
    )
    return math.sqrt(best / n)


def assignment(x, y) -> tuple[np.ndarray, float]:
    """Optimal permutation sigma and its mean squared cost.

    ``sigma[i]`` is the index of the y-point matched to x_i.
    """
    a, b = _paired_clouds(x, y)
    cost = cdist(a, b, metric="sqeuclidean")
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty_like(cols)
    perm[rows] = cols
    return perm, math.fsum(cost[rows, cols]) / a.shape[0]


def in_wasserstein_ball(center, y, delta: float) -> bool:
    """True iff wasserstein2(center, y) <= delta."""
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    return wasserstein2(center, y) <= delta


def permutation_separation_threshold(x) -> float:
    """Radius below which the permuted aligned-vector balls are disjoint.

    min over non-identity permutations sigma of
    ``euclidean_aligned(x, x_sigma) / (3 sqrt(n))``.  Requires pairwise
    distinct points and n >= 2; the permutation enumeration shares the n! cap
    of the brute-force oracle.
    """
    a = as_cloud(x)
    n = a.shape[0]
    if n < 2:
        raise ValueError("threshold needs n >= 2 (no non-identity permutation otherwise)")
    if n > BRUTE_FORCE_MAX_POINTS:
        raise ValueError(f"permutation enumeration limited to n <= {BRUTE_FORCE_MAX_POINTS}")
    for i in range(n):
        for j in range(i + 1, n):
            if np.array_equal(a[i], a[j]):
                raise ValueError("points must be pairwise distinct")
    best = math.inf
    identity = tuple(range(n))
    for perm in itertools.permutations(range(n)):
        if perm == identity:
            continue
        best = min(best, euclidean_aligned(a, a[list(perm)]))
    return best / (3.0 * math.sqrt(n))
