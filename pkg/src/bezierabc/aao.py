"""Deterministic all-at-once least-squares baseline.

Fits a Bezier simplex to data points by alternating two half-steps until
the mean squared residual stops improving:

* control-point step — for fixed parameters t_i, the loss is quadratic in
  the control points and is minimized exactly by linear least squares on
  the Bernstein design matrix;
* parameter step — for a fixed model, each t_i is moved to a local foot of
  the perpendicular from x_i onto the surface, by damped Gauss-Newton in
  the chart u = (t_1, ..., t_{M-1}), t_M = 1 - sum(u), with steps clipped
  back onto the simplex.

Both half-steps only ever accept improvements, so the recorded loss
trajectory is non-increasing.  The parameter step can stall at a
non-stationary point when Gauss-Newton fails; that is reported through a
``converged`` flag rather than an exception, and the best iterate seen is
returned.

This module owns the Bernstein-basis derivative code; nothing else needs
gradients of the surface.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bezier import (
    BezierModel,
    bernstein_design,
    check_simplex_param,
    enumerate_degrees,
    evaluate,
    multinomial_coeff,
    num_degrees,
)
from .transport import as_cloud


@dataclass(frozen=True)
class AaoConfig:
    max_outer_iters: int = 100
    t_newton_iters: int = 20
    t_tol: float = 1e-8
    loss_tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.max_outer_iters < 1 or self.t_newton_iters < 1:
            raise ValueError("iteration limits must be >= 1")
        if self.t_tol <= 0 or self.loss_tol <= 0:
            raise ValueError("tolerances must be > 0")


@dataclass(frozen=True)
class ControlPointFit:
    control: np.ndarray
    rank: int
    rank_deficient: bool


@dataclass(frozen=True)
class ProjectionResult:
    t: np.ndarray
    loss: float
    converged: bool
    iterations: int


@dataclass(frozen=True)
class AaoFitResult:
    model: BezierModel
    params: np.ndarray
    cp_losses: tuple[float, ...]
    proj_losses: tuple[float, ...]
    converged: bool
    rank_deficient: bool
    projection_failures: int

    @property
    def loss_trajectory(self) -> list[float]:
        """Per half-step losses, interleaved control-point / projection."""
        out: list[float] = []
        for i, cp in enumerate(self.cp_losses):
            out.append(cp)
            if i < len(self.proj_losses):
                out.append(self.proj_losses[i])
        return out


def ols_loss(model: BezierModel, data, params) -> float:
    """Mean squared residual (1/n) sum_i ||x_i - b(t_i)||^2."""
    data = as_cloud(data)
    values = evaluate(model, np.atleast_2d(params))
    return float(((data - values) ** 2).sum(axis=1).mean())


def fit_control_points(data, params, order: int) -> ControlPointFit:
    """Exact least-squares control points for fixed parameters.

    Uses an SVD solve, so a rank-deficient design matrix yields the
    minimum-norm solution and is flagged in the result.
    """
    data = as_cloud(data)
    params = check_simplex_param(np.atleast_2d(params))
    if params.shape[0] != data.shape[0]:
        raise ValueError(
            f"got {params.shape[0]} parameters for {data.shape[0]} data points"
        )
    k = num_degrees(order, data.shape[1])
    if data.shape[0] < k:
        raise ValueError(f"need at least {k} points to determine {k} control points")
    design = bernstein_design(params, enumerate_degrees(order, data.shape[1]))
    control, _, rank, _ = np.linalg.lstsq(design, data, rcond=None)
    rank = int(rank)
    return ControlPointFit(control=control, rank=rank, rank_deficient=rank < k)


def _basis_and_partials(t: np.ndarray, degrees: np.ndarray, coeffs: np.ndarray):
    """Bernstein basis phi (K,) and its partials dphi (K, M) at one t."""
    powers = np.power(t[None, :], degrees)
    phi = coeffs * powers.prod(axis=1)
    k, m = degrees.shape
    dphi = np.zeros((k, m))
    for j in range(m):
        expj = degrees[:, j]
        # d/dt_j t_j^d = d * t_j^(d-1); zero when d = 0, exact at t_j = 0
        tj_pow = np.where(expj > 0, np.power(t[j], np.maximum(expj - 1, 0)), 0.0)
        others = np.prod(np.delete(powers, j, axis=1), axis=1)
        dphi[:, j] = coeffs * expj * tj_pow * others
    return phi, dphi


def surface_jacobian(model: BezierModel, t: np.ndarray) -> np.ndarray:
    """Jacobian of b(t) with respect to the chart u = t[:-1], shape (M, M-1)."""
    t = check_simplex_param(np.asarray(t, dtype=float))
    degrees = model.degrees
    coeffs = np.array([multinomial_coeff(model.order, d) for d in degrees], dtype=float)
    _, dphi = _basis_and_partials(t, degrees, coeffs)
    jac_t = model.control.T @ dphi  # (M, M): columns are d b / d t_m
    return jac_t[:, :-1] - jac_t[:, -1:]


def _clip_to_simplex(u: np.ndarray) -> np.ndarray:
    t = np.append(u, 1.0 - u.sum())
    t = np.clip(t, 0.0, None)
    total = t.sum()
    if total == 0.0:
        return np.full_like(t, 1.0 / t.size)
    return t / total


def project_parameter(
    model: BezierModel, x, t0, config: Optional[AaoConfig] = None
) -> ProjectionResult:
    """Local minimizer of ||x - b(t)||^2 over the simplex, from t0.

    Damped Gauss-Newton in the chart; only improving steps are accepted, so
    the returned loss never exceeds the loss at t0.  ``converged`` means the
    residual was orthogonal to the chart tangents within ``t_tol``.
    """
    cfg = config if config is not None else AaoConfig()
    x = np.asarray(x, dtype=float)
    degrees = model.degrees
    coeffs = np.array([multinomial_coeff(model.order, d) for d in degrees], dtype=float)
    t = check_simplex_param(np.asarray(t0, dtype=float)).copy()

    def residual(tv):
        phi = coeffs * np.power(tv[None, :], degrees).prod(axis=1)
        return x - phi @ model.control

    loss = float((residual(t) ** 2).sum())
    converged = False
    iterations = 0
    for iterations in range(1, cfg.t_newton_iters + 1):
        phi, dphi = _basis_and_partials(t, degrees, coeffs)
        r = x - phi @ model.control
        jac_t = model.control.T @ dphi
        jac_u = jac_t[:, :-1] - jac_t[:, -1:]
        if np.abs(jac_u.T @ r).max() <= cfg.t_tol:
            converged = True
            break
        step, *_ = np.linalg.lstsq(jac_u, r, rcond=None)
        alpha = 1.0
        accepted = False
        while alpha >= 2.0**-20:
            cand = _clip_to_simplex(t[:-1] + alpha * step)
            cand_loss = float((residual(cand) ** 2).sum())
            if cand_loss < loss:
                t, loss, accepted = cand, cand_loss, True
                break
            alpha *= 0.5
        if not accepted:
            break
    else:
        iterations = cfg.t_newton_iters
    if not converged:
        # final orthogonality check in case the last accepted step landed on it
        phi, dphi = _basis_and_partials(t, degrees, coeffs)
        r = x - phi @ model.control
        jac_t = model.control.T @ dphi
        jac_u = jac_t[:, :-1] - jac_t[:, -1:]
        converged = bool(np.abs(jac_u.T @ r).max() <= cfg.t_tol)
    return ProjectionResult(t=t, loss=loss, converged=converged, iterations=iterations)


INIT_SOFTMAX_TEMPERATURE = 0.25


def initial_params(data, temperature: float = INIT_SOFTMAX_TEMPERATURE) -> np.ndarray:
    """Softmax over negated min-max-normalized objectives.

    Points strong in objective m start near vertex m; deterministic.  The
    temperature sets the contrast; too flat an assignment makes the first
    least-squares step ill-conditioned and inflates interior control points.
    """
    data = as_cloud(data)
    lo, hi = data.min(axis=0), data.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    z = (data - lo) / span
    w = np.exp(-z / temperature)
    return w / w.sum(axis=1, keepdims=True)


def aao_fit(
    data,
    order: int,
    config: Optional[AaoConfig] = None,
    init_params: Optional[np.ndarray] = None,
) -> AaoFitResult:
    """Alternate control-point and parameter half-steps until stall."""
    cfg = config if config is not None else AaoConfig()
    data = as_cloud(data)
    n, dim = data.shape
    t = (
        check_simplex_param(np.atleast_2d(np.asarray(init_params, dtype=float)))
        if init_params is not None
        else initial_params(data)
    )
    if t.shape != (n, dim):
        raise ValueError(f"initial parameters must have shape {(n, dim)}, got {t.shape}")

    cp_losses: list[float] = []
    proj_losses: list[float] = []
    rank_deficient = False
    projection_failures = 0
    converged = False
    prev_loss = np.inf
    model = None
    for _ in range(cfg.max_outer_iters):
        fit = fit_control_points(data, t, order)
        rank_deficient = rank_deficient or fit.rank_deficient
        model = BezierModel(order=order, dim=dim, control=fit.control)
        cp_losses.append(ols_loss(model, data, t))

        new_t = t.copy()
        for i in range(n):
            res = project_parameter(model, data[i], t[i], cfg)
            new_t[i] = res.t
            if not res.converged:
                projection_failures += 1
        t = new_t
        loss = ols_loss(model, data, t)
        proj_losses.append(loss)
        if prev_loss - loss < cfg.loss_tol:
            converged = True
            break
        prev_loss = loss

    # refresh the control points against the final parameters
    fit = fit_control_points(data, t, order)
    rank_deficient = rank_deficient or fit.rank_deficient
    model = BezierModel(order=order, dim=dim, control=fit.control)
    cp_losses.append(ols_loss(model, data, t))

    return AaoFitResult(
        model=model,
        params=t,
        cp_losses=tuple(cp_losses),
        proj_losses=tuple(proj_losses),
        converged=converged,
        rank_deficient=rank_deficient,
        projection_failures=projection_failures,
    )
