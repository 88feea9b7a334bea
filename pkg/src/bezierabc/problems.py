"""Synthetic multi-objective benchmarks and dataset plumbing.

Three analytic problems with known Pareto fronts:

* schaffer — one variable, two objectives (x^2, (x-2)^2); Pareto set is
  x in [0, 2].
* med — M variables, M objectives f_m(x) = (||x - e_m|| / sqrt(2))^p_m with
  p_m = exp(2(m-1)/(M-1) - 1); the Pareto set is the convex hull of the
  unit vectors e_m, sampled here through uniform barycentric weights.
* viennet2 — two variables, three quadratic objectives on [-4, 4]^2; the
  front is obtained by evaluating a regular grid and keeping the
  nondominated image points.

Everything downstream consumes objective-space clouds only.  Clouds are
written as CSV with header ``f1,...,fM`` using shortest round-trip decimal
representation, with a JSON metadata sidecar.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bezier import sample_uniform_simplex
from .transport import as_cloud

PROBLEM_NAMES = ("schaffer", "viennet2", "med")

# Sample sizes of the reference datasets, used as generator defaults.
DEFAULT_FRONT_SIZES = {"schaffer": 201, "viennet2": 8122, ("med", 3): 153, ("med", 5): 4845}


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    dim: int
    grid_res: int = 300

    def __post_init__(self):
        if self.name not in PROBLEM_NAMES:
            raise ValueError(f"unknown problem {self.name!r}")
        if self.name == "schaffer" and self.dim != 2:
            raise ValueError("schaffer has exactly 2 objectives")
        if self.name == "viennet2" and self.dim != 3:
            raise ValueError("viennet2 has exactly 3 objectives")
        if self.name == "med" and self.dim < 2:
            raise ValueError("med needs at least 2 objectives")
        if self.name == "viennet2" and self.grid_res < 50:
            raise ValueError(f"grid_res must be >= 50, got {self.grid_res}")

    @property
    def label(self) -> str:
        return f"{self.dim}-med" if self.name == "med" else self.name


def parse_problem(text: str, med_dim: Optional[int] = None, grid_res: int = 300) -> ProblemSpec:
    """Parse a problem label: 'schaffer', 'viennet2', 'med', '3-med', '5-med', ..."""
    name = text.strip().lower()
    if name == "schaffer":
        return ProblemSpec("schaffer", 2)
    if name == "viennet2":
        return ProblemSpec("viennet2", 3, grid_res=grid_res)
    if name == "med":
        if med_dim is None:
            raise ValueError("'med' needs an explicit objective count")
        return ProblemSpec("med", int(med_dim))
    if name.endswith("-med"):
        return ProblemSpec("med", int(name[: -len("-med")]))
    raise ValueError(f"unknown problem {text!r}")


def default_front_size(spec: ProblemSpec) -> Optional[int]:
    if spec.name == "med":
        return DEFAULT_FRONT_SIZES.get((spec.name, spec.dim))
    return DEFAULT_FRONT_SIZES.get(spec.name)


# ---------------------------------------------------------------------------
# Dominance filtering
# ---------------------------------------------------------------------------


def nondominated_mask(points) -> np.ndarray:
    """Boolean mask of points not dominated by any other point.

    y dominates x iff y <= x in every objective and y < x in at least one;
    equal points never dominate each other.  Plain O(n^2) pairwise
    comparison, chunked to bound memory.
    """
    pts = as_cloud(points)
    n = pts.shape[0]
    keep = np.ones(n, dtype=bool)
    chunk = max(1, (1 << 22) // n)
    for start in range(0, n, chunk):
        block = pts[start : start + chunk]
        le_all = (pts[:, None, :] <= block[None, :, :]).all(axis=2)
        lt_any = (pts[:, None, :] < block[None, :, :]).any(axis=2)
        keep[start : start + block.shape[0]] = ~(le_all & lt_any).any(axis=0)
    return keep


def nondominated_filter(points) -> np.ndarray:
    """Nondominated subset, preserving input order."""
    pts = as_cloud(points)
    return pts[nondominated_mask(pts)]


def _nondominated_mask_large(pts: np.ndarray) -> np.ndarray:
    """Same mask as :func:`nondominated_mask` via a sorted archive sweep.

    After lexicographic sorting no point can be dominated by a later one, so
    each point only needs checking against the nondominated archive built so
    far.  Used for large grids where the quadratic filter is too slow.
    """
    n = pts.shape[0]
    order = np.lexsort(pts.T[::-1])
    keep = np.zeros(n, dtype=bool)
    archive = np.empty_like(pts)
    count = 0
    for idx in order:
        p = pts[idx]
        if count:
            a = archive[:count]
            if bool(((a <= p).all(axis=1) & (a < p).any(axis=1)).any()):
                continue
        archive[count] = p
        count += 1
        keep[idx] = True
    return keep


# ---------------------------------------------------------------------------
# Front generators
# ---------------------------------------------------------------------------


def schaffer_front(count: int, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Sample the Schaffer front: x uniform on [0, 2], f = (x^2, (x-2)^2)."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = rng if rng is not None else np.random.default_rng()
    x = rng.uniform(0.0, 2.0, size=count)
    return np.column_stack([x**2, (x - 2.0) ** 2])


def med_exponents(dim: int) -> np.ndarray:
    """Objective exponents p_m = exp(2(m-1)/(M-1) - 1)."""
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    m = np.arange(1, dim + 1)
    return np.exp(2.0 * (m - 1) / (dim - 1) - 1.0)


def med_objectives(x, dim: int) -> np.ndarray:
    """Objective values f_m(x) = (||x - e_m|| / sqrt(2))^p_m for x (n, dim)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != dim:
        raise ValueError(f"decision vectors must have {dim} coordinates")
    basis = np.eye(dim)
    dists = np.sqrt(((x[:, None, :] - basis[None, :, :]) ** 2).sum(axis=2))
    return (dists / np.sqrt(2.0)) ** med_exponents(dim)[None, :]


def med_front(dim: int, count: int, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Sample the med front through the convex hull of the unit vectors.

    Pareto-optimal decisions are convex combinations x = sum_m t_m e_m with
    uniform barycentric weights t; every batch is checked to be internally
    nondominated.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = rng if rng is not None else np.random.default_rng()
    t = sample_uniform_simplex(dim, count, rng)
    values = med_objectives(t, dim)
    if not nondominated_mask(values).all():
        raise AssertionError("med front sampler produced a dominated point")
    return values


def viennet2_objectives(x) -> np.ndarray:
    """The three Viennet2 objectives for decision vectors x (n, 2)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != 2:
        raise ValueError("viennet2 takes 2-dimensional decision vectors")
    x1, x2 = x[:, 0], x[:, 1]
    f1 = (x1 - 2.0) ** 2 / 2.0 + (x2 + 1.0) ** 2 / 13.0 + 3.0
    f2 = (x1 + x2 - 3.0) ** 2 / 36.0 + (-x1 + x2 + 2.0) ** 2 / 8.0 - 17.0
    f3 = (x1 + 2.0 * x2 - 1.0) ** 2 / 175.0 + (2.0 * x2 - x1) ** 2 / 17.0 - 13.0
    return np.column_stack([f1, f2, f3])


def viennet2_nondominated_grid(grid_res: int = 300) -> np.ndarray:
    """Nondominated image of a grid_res x grid_res grid over [-4, 4]^2."""
    if grid_res < 50:
        raise ValueError(f"grid_res must be >= 50, got {grid_res}")
    axis = np.linspace(-4.0, 4.0, grid_res)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    values = viennet2_objectives(np.column_stack([xx.ravel(), yy.ravel()]))
    return values[_nondominated_mask_large(values)]


def viennet2_front(
    count: int, grid_res: int = 300, rng: Optional[np.random.Generator] = None
) -> np.ndarray:
    """Subsample the nondominated grid image uniformly without replacement."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = rng if rng is not None else np.random.default_rng()
    front = viennet2_nondominated_grid(grid_res)
    if count > front.shape[0]:
        raise ValueError(
            f"requested {count} points but the grid front has only {front.shape[0]}"
        )
    idx = rng.choice(front.shape[0], size=count, replace=False)
    return front[idx]


def sample_front(
    spec: ProblemSpec, count: int, rng: Optional[np.random.Generator] = None
) -> np.ndarray:
    if spec.name == "schaffer":
        return schaffer_front(count, rng)
    if spec.name == "med":
        return med_front(spec.dim, count, rng)
    return viennet2_front(count, grid_res=spec.grid_res, rng=rng)


# ---------------------------------------------------------------------------
# Noise and file formats
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float
    seed: Optional[int] = None

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")


def add_noise(cloud, spec: NoiseSpec, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Add i.i.d. N(0, sigma^2) per coordinate; sigma = 0 returns the input."""
    pts = as_cloud(cloud)
    if spec.sigma == 0.0:
        return pts.copy()
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    return pts + spec.sigma * rng.standard_normal(pts.shape)


def write_cloud_csv(path, cloud) -> None:
    """CSV with header f1,...,fM; values in shortest round-trip decimals."""
    pts = as_cloud(cloud)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(f"f{j + 1}" for j in range(pts.shape[1])) + "\n")
        for row in pts:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_cloud_csv(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        columns = header.split(",") if header else []
        if not columns or any(c != f"f{j + 1}" for j, c in enumerate(columns)):
            raise ValueError(f"{path}: expected header f1,...,fM, got {header!r}")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(columns):
                raise ValueError(f"{path}:{lineno}: expected {len(columns)} values")
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def write_dataset_meta(path, spec: ProblemSpec, count: int, sigma: float, seed: int) -> None:
    payload = {
        "problem": spec.label,
        "M": spec.dim,
        "count": int(count),
        "sigma": float(sigma),
        "seed": int(seed),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def read_dataset_meta(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
