"""Front-approximation quality metrics and the rank-sum comparison.

GD measures precision (how close sampled surface points are to the
validation front), IGD measures recall (how well the validation front is
covered):

    gd(X, Y)  = (1/|X|) sum_{x in X} min_{y in Y} ||x - y||
    igd(X, Y) = (1/|Y|) sum_{y in Y} min_{x in X} ||x - y||

Nearest neighbors are brute force on the full distance matrix; exact by
construction at the cloud sizes used here.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist
from scipy.stats import norm, rankdata

from .bezier import BezierModel, sample_model
from .transport import as_cloud

METRICS_CSV_FIELDS = (
    "problem",
    "M",
    "n",
    "sigma",
    "method",
    "trial",
    "seed",
    "gd",
    "igd",
    "seconds",
)


def _paired_dims(x, y):
    a, b = as_cloud(x), as_cloud(y)
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"cloud dimensions differ: {a.shape[1]} vs {b.shape[1]}")
    return a, b


def gd(x, y) -> float:
    """Mean distance from each point of x to its nearest neighbor in y."""
    a, b = _paired_dims(x, y)
    return float(cdist(a, b).min(axis=1).mean())


def igd(x, y) -> float:
    """gd with the roles swapped: mean distance from y-points to x."""
    return gd(y, x)


def surface_sample_for_metrics(
    model: BezierModel, count: int = 1000, rng: Optional[np.random.Generator] = None
) -> np.ndarray:
    """Uniformly parameterized sample of the model surface, the X of gd/igd."""
    rng = rng if rng is not None else np.random.default_rng()
    return sample_model(model, count, rng)


def ranksum_test(a, b) -> tuple[float, float]:
    """Two-sided Wilcoxon rank-sum via the tie-corrected normal approximation.

    Returns (z, p).  Swapping the samples negates z and keeps p; identical
    samples give z = 0, p = 1.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size < 5 or b.size < 5:
        raise ValueError(f"need at least 5 values per sample, got {a.size} and {b.size}")
    n1, n2 = a.size, b.size
    n = n1 + n2
    ranks = rankdata(np.concatenate([a, b]))
    w = ranks[:n1].sum()
    expected = n1 * (n + 1) / 2.0
    _, tie_counts = np.unique(np.concatenate([a, b]), return_counts=True)
    tie_term = ((tie_counts**3 - tie_counts).sum()) / (n * (n - 1))
    variance = n1 * n2 / 12.0 * (n + 1 - tie_term)
    if variance <= 0:
        return 0.0, 1.0
    z = (w - expected) / np.sqrt(variance)
    return float(z), float(2.0 * norm.sf(abs(z)))
