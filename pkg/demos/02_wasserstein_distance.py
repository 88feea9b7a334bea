"""
Cloud distances and the permutation-ball picture
================================================

The acceptance rule of the probabilistic fitter compares point clouds with
the exact 2-Wasserstein distance: the best pairing of points, not the
given ordering.
"""

import numpy as np

from bezierabc import (
    euclidean_aligned,
    in_wasserstein_ball,
    permutation_separation_threshold,
    wasserstein2,
    wasserstein2_bruteforce,
)

x = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
y = x[::-1] + 0.01  # same cloud, reversed order, slightly shifted

# The aligned (order-sensitive) Euclidean distance is fooled by the
# reordering; the Wasserstein distance pairs points optimally.
print("aligned euclidean:", euclidean_aligned(x, y))
print("wasserstein-2:    ", wasserstein2(x, y))

# The assignment solver agrees with brute-force minimization over all n!
# permutations (the test oracle).
rng = np.random.default_rng(1)
a, b = rng.normal(size=(5, 2)), rng.normal(size=(5, 2))
print("fast vs brute force:", wasserstein2(a, b), wasserstein2_bruteforce(a, b))

# For small enough radii, the Wasserstein ball around a cloud with distinct
# points splits into n! disjoint Euclidean balls, one per reordering of the
# cloud.  The threshold below which that holds:
thr = permutation_separation_threshold(x)
print("separation threshold:", round(thr, 4))

delta = 0.9 * thr
radius = np.sqrt(len(x)) * delta
probe = x[[1, 0, 2]] + 0.5 * radius / np.sqrt(x.size)  # near a permuted copy
print("probe in Wasserstein ball:", in_wasserstein_ball(x, probe, delta))
print(
    "aligned distance to that permuted center:",
    round(euclidean_aligned(x[[1, 0, 2]], probe), 4),
    "<= radius",
    round(radius, 4),
)
