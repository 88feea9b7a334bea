"""Bezier simplex core.

A Bezier simplex of order ``D`` in dimension ``M`` maps the (M-1)-simplex

    { t in R^M : t_m >= 0, sum_m t_m = 1 }

into R^M through Bernstein-style monomials indexed by the multi-indices
``d`` with ``sum(d) = D``.  Each multi-index carries a control point
``p_d`` in R^M:

    b(t) = sum_d  multinom(D, d) * t_1^d_1 * ... * t_M^d_M * p_d

The module provides the degree enumeration, exact multinomial coefficients,
vectorized evaluation, uniform simplex sampling, the push-forward sampler
(the generative view of the model: draw t uniformly, emit b(t)), and the
JSON serialization of a model.

Conventions
-----------
* Degrees are enumerated in lexicographically descending order of their
  exponent tuples; that order is part of the serialization contract and is
  used everywhere a flat (K, M) control-point array appears.
* ``0**0 == 1`` in monomial evaluation, so evaluation at a simplex vertex
  returns the matching corner control point exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

SIMPLEX_ATOL = 1e-12


def num_degrees(order: int, dim: int) -> int:
    """Number of multi-indices of length ``dim`` summing to ``order``."""
    return math.comb(order + dim - 1, dim - 1)


def enumerate_degrees(order: int, dim: int) -> np.ndarray:
    """All exponent vectors of length ``dim`` summing to ``order``.

    Returns an (K, dim) int array in lexicographically descending order,
    K = C(order + dim - 1, dim - 1).
    """
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    rows: list[tuple[int, ...]] = []

    def _extend(prefix: tuple[int, ...], remaining: int, slots: int) -> None:
        if slots == 1:
            rows.append(prefix + (remaining,))
            return
        for k in range(remaining, -1, -1):
            _extend(prefix + (k,), remaining - k, slots - 1)

    _extend((), order, dim)
    out = np.array(rows, dtype=np.int64)
    assert out.shape == (num_degrees(order, dim), dim)
    return out


def multinomial_coeff(order: int, exponents) -> int:
    """Exact multinomial coefficient order! / prod(exponents!)."""
    exps = [int(e) for e in np.asarray(exponents).ravel()]
    if any(e < 0 for e in exps):
        raise ValueError(f"exponents must be non-negative, got {exps}")
    if sum(exps) != order:
        raise ValueError(f"exponents {exps} do not sum to order {order}")
    coeff = math.factorial(order)
    for e in exps:
        coeff //= math.factorial(e)
    return coeff


def check_simplex_param(t: np.ndarray, atol: float = SIMPLEX_ATOL) -> np.ndarray:
    """Validate barycentric coordinates: non-negative, summing to 1.

    Accepts a single (M,) vector or a batch (n, M); returns the input as a
    float array.
    """
    arr = np.asarray(t, dtype=float)
    if arr.ndim not in (1, 2):
        raise ValueError(f"simplex parameters must be 1-D or 2-D, got shape {arr.shape}")
    if np.any(arr < -atol):
        raise ValueError("simplex parameter has a negative coordinate")
    sums = arr.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > atol * max(1, arr.shape[-1])):
        raise ValueError("simplex parameter coordinates do not sum to 1")
    return arr


@dataclass(frozen=True)
class BezierModel:
    """Bezier simplex: order, target dimension, and control points.

    ``control`` is a (K, dim) array whose rows follow the canonical degree
    order of :func:`enumerate_degrees`.
    """

    order: int
    dim: int
    control: np.ndarray

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"model order must be >= 1, got {self.order}")
        if self.dim < 2:
            raise ValueError(f"model dimension must be >= 2, got {self.dim}")
        control = np.asarray(self.control, dtype=float)
        expected = (num_degrees(self.order, self.dim), self.dim)
        if control.shape != expected:
            raise ValueError(
                f"control points must have shape {expected}, got {control.shape}"
            )
        object.__setattr__(self, "control", control)

    @property
    def degrees(self) -> np.ndarray:
        return enumerate_degrees(self.order, self.dim)

    def control_point(self, degree) -> np.ndarray:
        """Control point attached to one exponent vector."""
        key = np.asarray(degree, dtype=np.int64)
        rows = np.nonzero((self.degrees == key).all(axis=1))[0]
        if rows.size == 0:
            raise KeyError(f"degree {tuple(key)} not valid for order {self.order}")
        return self.control[rows[0]]


def bernstein_design(params: np.ndarray, degrees: np.ndarray) -> np.ndarray:
    """Design matrix of weighted Bernstein monomials.

    params: (n, M) simplex parameters, degrees: (K, M).  Entry (i, k) is
    multinom(D, d_k) * prod_m t_im^{d_km}, with 0**0 == 1.
    """
    params = np.atleast_2d(np.asarray(params, dtype=float))
    degrees = np.asarray(degrees, dtype=np.int64)
    order = int(degrees[0].sum())
    coeffs = np.array([multinomial_coeff(order, d) for d in degrees], dtype=float)
    # np.power(0.0, 0) == 1.0, which is exactly the convention we need.
    monomials = np.power(params[:, None, :], degrees[None, :, :]).prod(axis=2)
    return coeffs[None, :] * monomials


def evaluate(model: BezierModel, t: np.ndarray) -> np.ndarray:
    """Evaluate the model at one parameter (M,) or a batch (n, M)."""
    arr = check_simplex_param(t)
    single = arr.ndim == 1
    design = bernstein_design(np.atleast_2d(arr), model.degrees)
    values = design @ model.control
    return values[0] if single else values


def sample_uniform_simplex(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. uniform draws on the (dim-1)-simplex, shape (count, dim).

    Normalized unit-rate exponentials: exact and rejection-free.
    """
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    gammas = rng.standard_exponential(size=(count, dim))
    return gammas / gammas.sum(axis=1, keepdims=True)


def sample_model(model: BezierModel, count: int, rng: np.random.Generator) -> np.ndarray:
    """Push-forward sampler: draw t uniformly on the simplex, return b(t)."""
    t = sample_uniform_simplex(model.dim, count, rng)
    return evaluate(model, t)


def model_to_json(model: BezierModel) -> dict:
    """JSON-ready dict {order, dim, control_points: [{degree, point}, ...]}."""
    return {
        "order": model.order,
        "dim": model.dim,
        "control_points": [
            {"degree": [int(e) for e in degree], "point": [float(v) for v in point]}
            for degree, point in zip(model.degrees, model.control)
        ],
    }


def model_from_json(payload: dict) -> BezierModel:
    """Inverse of :func:`model_to_json`; entries may arrive in any order."""
    order = int(payload["order"])
    dim = int(payload["dim"])
    degrees = enumerate_degrees(order, dim)
    lookup = {
        tuple(int(e) for e in item["degree"]): np.asarray(item["point"], dtype=float)
        for item in payload["control_points"]
    }
    if len(lookup) != len(degrees):
        raise ValueError(
            f"expected {len(degrees)} control points, got {len(lookup)} distinct degrees"
        )
    control = np.stack([lookup[tuple(d)] for d in degrees.tolist()])
    return BezierModel(order=order, dim=dim, control=control)


def save_model(path, model: BezierModel) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json(model), fh, indent=2)
        fh.write("\n")


def load_model(path) -> BezierModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json(json.load(fh))
