"""
Scaling laws of the rejection sampler
=====================================

Two quantities scale polynomially in the acceptance threshold delta:

* the posterior bias of the accepted-sample mean shrinks like delta^2;
* the acceptance probability shrinks like delta^(n*M) (ball volume).

Both are measured here on the 1-D Gaussian toy model, at reduced budgets;
the full-protocol runs live in the acceptance test suite.
"""

import numpy as np

from bezierabc import GaussianToy, acceptance_scan, ball_volume, bias_scan

toy = GaussianToy()

# Posterior bias: per trial, fit log|bias| against log(delta) and report
# the slope over the middle of the grid (the extremes are noisy).
scan = bias_scan(
    toy,
    n=50,
    n_abc=400,
    trials=4,
    delta_grid=np.logspace(-0.8, 0.5, 9),
    rng=np.random.default_rng(0),
    max_proposals_per_trial=1_000_000,
)
print("bias vs delta, middle-points slope:",
      f"{scan.slope_middle_mean:.2f} +/- {scan.slope_middle_std:.2f} (expect ~2)")

# Acceptance rate: two data points in one dimension means the rate falls
# like the volume of a 2-ball, delta^2.
grid = np.logspace(-1.5, 0.0, 7)
accept = acceptance_scan(toy, n=2, delta_grid=grid, proposals_per_cell=100_000,
                         rng=np.random.default_rng(1))
for delta, rate in zip(accept.delta_grid, accept.rates):
    print(f"  delta = {delta:6.4f}   acceptance rate = {rate:.5f}")
print("log-log slope:", f"{accept.slope:.2f} (expect n*M = 2)")

# The rate prefactor follows the ball volume; volumes themselves:
print("unit-ball volumes q=1..5:", [round(ball_volume(q, 1.0), 4) for q in range(1, 6)])
