"""Rejection-ABC fitting of Bezier simplices with an adaptive Gaussian prior.

The parameter of interest is the full set of control points.  The prior
factorizes over control points: one multivariate normal per degree, with
hyperparameters (mean, covariance).  One fitting round

  1. draws control-point sets from the current prior,
  2. pushes each through the generative sampler to get a synthetic cloud of
     the data's size,
  3. accepts the draw when the cloud's distance to the data is at most
     ``delta`` (2-Wasserstein by default),
  4. refits the per-degree means and covariances on the accepted draws,
  5. re-estimates the typical model-data distance ``epsilon`` under the new
     prior and shrinks the threshold to ``delta_shrink * epsilon``.

Rounds repeat until the configured count is reached, the covariances
collapse (max eigenvalue at most ``eig_stop``), or a round's proposal
budget runs out before enough draws are accepted.  The initial ``delta``,
unless given, is the mean distance under the initial prior (no shrink
factor on that first estimate).

Proposals are consumed in fixed-size batches, each batch on its own child
random stream, so a parallel driver that evaluates batches out of order and
merges results in batch order reproduces the serial run exactly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .bezier import (
    BezierModel,
    bernstein_design,
    enumerate_degrees,
    num_degrees,
    sample_uniform_simplex,
)
from .transport import as_cloud, wasserstein2

SYMMETRY_ATOL = 1e-10
PSD_EIG_TOL = 1e-10

Distance = Callable[[np.ndarray, np.ndarray], float]


@dataclass(frozen=True)
class ControlPointPrior:
    """Per-degree independent Gaussian prior over control points.

    ``means`` is (K, dim) and ``covs`` is (K, dim, dim), rows in canonical
    degree order for a Bezier simplex of the given ``order``.
    """

    order: int
    dim: int
    means: np.ndarray
    covs: np.ndarray

    def __post_init__(self):
        means = np.asarray(self.means, dtype=float)
        covs = np.asarray(self.covs, dtype=float)
        k = num_degrees(self.order, self.dim)
        if means.shape != (k, self.dim):
            raise ValueError(f"means must have shape {(k, self.dim)}, got {means.shape}")
        if covs.shape != (k, self.dim, self.dim):
            raise ValueError(
                f"covs must have shape {(k, self.dim, self.dim)}, got {covs.shape}"
            )
        if np.abs(covs - covs.transpose(0, 2, 1)).max() > SYMMETRY_ATOL:
            raise ValueError("covariances must be symmetric")
        eigs = np.linalg.eigvalsh(0.5 * (covs + covs.transpose(0, 2, 1)))
        if eigs.min() < -PSD_EIG_TOL:
            raise ValueError(f"covariance has eigenvalue {eigs.min()} < -{PSD_EIG_TOL}")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "covs", covs)

    @property
    def degrees(self) -> np.ndarray:
        return enumerate_degrees(self.order, self.dim)


def _psd_factors(covs: np.ndarray) -> np.ndarray:
    """Per-degree factors F with F @ F.T = cov.

    Cholesky when positive definite; eigendecomposition with eigenvalues
    clipped at zero otherwise (covers exactly singular covariances such as
    collapsed or zero matrices without distorting the mean).
    """
    try:
        return np.linalg.cholesky(covs)
    except np.linalg.LinAlgError:
        pass
    factors = np.empty_like(covs)
    for k, cov in enumerate(covs):
        try:
            factors[k] = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            w, v = np.linalg.eigh(cov)
            if w.min() < -PSD_EIG_TOL:
                raise ValueError(f"covariance {k} is not PSD (min eigenvalue {w.min()})")
            factors[k] = v * np.sqrt(np.clip(w, 0.0, None))[None, :]
    return factors


def sample_prior(
    prior: ControlPointPrior, rng: np.random.Generator, size: Optional[int] = None
) -> np.ndarray:
    """Draw control-point sets: (K, dim) for size=None, else (size, K, dim)."""
    b = 1 if size is None else int(size)
    factors = _psd_factors(prior.covs)
    z = rng.standard_normal(size=(b, prior.means.shape[0], prior.dim))
    draws = prior.means[None] + np.einsum("kij,bkj->bki", factors, z)
    return draws[0] if size is None else draws


def sample_synthetic_clouds(
    thetas: np.ndarray, order: int, n_points: int, rng: np.random.Generator
) -> np.ndarray:
    """Push a batch of control-point sets (B, K, M) through the sampler.

    Returns (B, n_points, M); all batch entries share one parameter stream.
    """
    thetas = np.asarray(thetas, dtype=float)
    b, _, dim = thetas.shape
    degrees = enumerate_degrees(order, dim)
    t = sample_uniform_simplex(dim, b * n_points, rng)
    design = bernstein_design(t, degrees).reshape(b, n_points, -1)
    return np.einsum("bnk,bkm->bnm", design, thetas)


def rejection_abc(
    data,
    prior: ControlPointPrior,
    delta: float,
    n_abc: int,
    max_proposals: int,
    distance: Distance,
    rng: np.random.Generator,
    batch_size: int = 256,
) -> tuple[np.ndarray, int]:
    """Generic rejection kernel: draw from the prior, accept within delta.

    Stops after ``n_abc`` acceptances or ``max_proposals`` attempts,
    whichever comes first; short delivery shows up in the returned attempt
    count rather than as an exception.  Returns (accepted, attempted) with
    accepted of shape (A, K, dim).
    """
    data = as_cloud(data)
    if data.shape[1] != prior.dim:
        raise ValueError(f"data dimension {data.shape[1]} != prior dimension {prior.dim}")
    if not delta > 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    if n_abc < 1 or max_proposals < 1:
        raise ValueError("n_abc and max_proposals must be >= 1")
    n = data.shape[0]
    accepted: list[np.ndarray] = []
    attempted = 0
    while len(accepted) < n_abc and attempted < max_proposals:
        b = min(batch_size, max_proposals - attempted)
        sub = rng.spawn(1)[0]
        thetas = sample_prior(prior, sub, size=b)
        clouds = sample_synthetic_clouds(thetas, prior.order, n, sub)
        for i in range(b):
            attempted += 1
            if distance(data, clouds[i]) <= delta:
                accepted.append(thetas[i])
                if len(accepted) == n_abc:
                    break
    if accepted:
        return np.stack(accepted), attempted
    return np.empty((0, prior.means.shape[0], prior.dim)), attempted


def update_hyperparams(samples: np.ndarray, order: int) -> ControlPointPrior:
    """Refit the per-degree Gaussian on accepted draws (A, K, dim), A >= 2.

    Covariances use the n-1 denominator, are symmetrized, and have negative
    eigenvalues from finite-sample roundoff clipped at zero.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 3:
        raise ValueError(f"samples must be (A, K, dim), got shape {samples.shape}")
    a = samples.shape[0]
    if a < 2:
        raise ValueError(f"need at least 2 samples to estimate a covariance, got {a}")
    dim = samples.shape[2]
    means = samples.mean(axis=0)
    centered = samples - means[None]
    covs = np.einsum("aki,akj->kij", centered, centered) / (a - 1)
    covs = 0.5 * (covs + covs.transpose(0, 2, 1))
    w, v = np.linalg.eigh(covs)
    covs = np.einsum("kij,kj,klj->kil", v, np.clip(w, 0.0, None), v)
    covs = 0.5 * (covs + covs.transpose(0, 2, 1))
    return ControlPointPrior(order=order, dim=dim, means=means, covs=covs)


def estimate_delta(
    prior: ControlPointPrior,
    data,
    n_delta: int,
    distance: Distance,
    rng: np.random.Generator,
) -> float:
    """Mean model-data distance over fresh draws from the prior."""
    data = as_cloud(data)
    if n_delta < 1:
        raise ValueError(f"n_delta must be >= 1, got {n_delta}")
    thetas = sample_prior(prior, rng, size=n_delta)
    clouds = sample_synthetic_clouds(thetas, prior.order, data.shape[0], rng)
    return float(np.mean([distance(data, clouds[i]) for i in range(n_delta)]))


def max_eigenvalue(cov: np.ndarray) -> float:
    """Largest eigenvalue of a symmetric PSD matrix."""
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError(f"covariance must be square, got shape {cov.shape}")
    if np.abs(cov - cov.T).max() > SYMMETRY_ATOL * max(1.0, np.abs(cov).max()):
        raise ValueError("matrix is not symmetric")
    return float(np.linalg.eigvalsh(cov)[-1])


def init_hyperparams(data, order: int, init_var: float = 0.1) -> ControlPointPrior:
    """Data-driven initial prior.

    Vertex means are the data points minimizing each objective coordinate;
    the remaining means sit on the simplex grid spanned by those vertices.
    Every covariance starts at ``init_var * I``.
    """
    data = as_cloud(data)
    if init_var <= 0:
        raise ValueError(f"init_var must be > 0, got {init_var}")
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    dim = data.shape[1]
    vertices = data[np.argmin(data, axis=0)]  # row m minimizes objective m
    degrees = enumerate_degrees(order, dim)
    means = (degrees / order) @ vertices
    covs = np.repeat(init_var * np.eye(dim)[None], len(degrees), axis=0)
    return ControlPointPrior(order=order, dim=dim, means=means, covs=covs)


@dataclass(frozen=True)
class AbcConfig:
    """Knobs of the fitting loop; defaults target desk-scale runs."""

    n_abc: int = 100
    n_updates: int = 50
    n_delta: int = 100
    max_proposals_per_round: int = 100_000
    eig_stop: float = 1e-5
    delta_shrink: float = 0.9
    seed: int = 0
    delta: Optional[float] = None  # None: estimate from the initial prior
    batch_size: int = 256

    def __post_init__(self):
        if min(self.n_abc, self.n_updates, self.n_delta) < 1:
            raise ValueError("n_abc, n_updates and n_delta must be >= 1")
        if self.max_proposals_per_round < 1 or self.batch_size < 1:
            raise ValueError("proposal budget and batch size must be >= 1")
        if self.eig_stop <= 0:
            raise ValueError(f"eig_stop must be > 0, got {self.eig_stop}")
        if not 0 < self.delta_shrink < 1:
            raise ValueError(f"delta_shrink must lie in (0, 1), got {self.delta_shrink}")
        if self.delta is not None and not self.delta > 0:
            raise ValueError(f"delta must be > 0, got {self.delta}")


@dataclass(frozen=True)
class AbcRoundTrace:
    round_index: int
    attempted: int
    accepted: int
    acceptance_rate: float
    delta: float
    epsilon: Optional[float]
    max_cov_eigenvalue: float
    hyperparams: ControlPointPrior


TERMINATION_REASONS = (
    "rounds-exhausted",
    "covariance-collapsed",
    "proposal-budget-exhausted",
)


@dataclass(frozen=True)
class FitReport:
    order: int
    dim: int
    hyperparams: ControlPointPrior
    rounds: tuple[AbcRoundTrace, ...]
    termination: str
    seed: int
    wall_seconds: float

    def __post_init__(self):
        if self.termination not in TERMINATION_REASONS:
            raise ValueError(f"unknown termination reason {self.termination!r}")

    @property
    def model(self) -> BezierModel:
        return model_from_prior(self.hyperparams)


def model_from_prior(prior: ControlPointPrior) -> BezierModel:
    """Point model whose control points are the prior means."""
    return BezierModel(order=prior.order, dim=prior.dim, control=prior.means.copy())


def wabc_fit(
    data,
    order: int,
    init_hp: Optional[ControlPointPrior] = None,
    config: Optional[AbcConfig] = None,
    rng: Optional[np.random.Generator] = None,
    distance: Distance = wasserstein2,
) -> FitReport:
    """Full adaptive fitting loop; see the module docstring for the schedule."""
    started = time.perf_counter()
    data = as_cloud(data)
    cfg = config if config is not None else AbcConfig()
    hp = init_hp if init_hp is not None else init_hyperparams(data, order)
    if hp.dim != data.shape[1]:
        raise ValueError(f"prior dimension {hp.dim} != data dimension {data.shape[1]}")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)

    if cfg.delta is not None:
        delta = cfg.delta
    else:
        delta = estimate_delta(hp, data, cfg.n_delta, distance, rng.spawn(1)[0])

    rounds: list[AbcRoundTrace] = []
    termination = "rounds-exhausted"
    for round_index in range(cfg.n_updates):
        r_abc, r_eps = rng.spawn(2)
        accepted, attempted = rejection_abc(
            data,
            hp,
            delta,
            cfg.n_abc,
            cfg.max_proposals_per_round,
            distance,
            r_abc,
            batch_size=cfg.batch_size,
        )
        if accepted.shape[0] < cfg.n_abc:
            # Round failed to deliver: keep the previous hyperparameters.
            rounds.append(
                AbcRoundTrace(
                    round_index=round_index,
                    attempted=attempted,
                    accepted=int(accepted.shape[0]),
                    acceptance_rate=accepted.shape[0] / attempted,
                    delta=delta,
                    epsilon=None,
                    max_cov_eigenvalue=_max_eig_over_degrees(hp),
                    hyperparams=hp,
                )
            )
            termination = "proposal-budget-exhausted"
            break
        hp = update_hyperparams(accepted, order)
        epsilon = estimate_delta(hp, data, cfg.n_delta, distance, r_eps)
        max_eig = _max_eig_over_degrees(hp)
        rounds.append(
            AbcRoundTrace(
                round_index=round_index,
                attempted=attempted,
                accepted=int(accepted.shape[0]),
                acceptance_rate=accepted.shape[0] / attempted,
                delta=delta,
                epsilon=epsilon,
                max_cov_eigenvalue=max_eig,
                hyperparams=hp,
            )
        )
        delta = cfg.delta_shrink * epsilon
        if max_eig <= cfg.eig_stop:
            termination = "covariance-collapsed"
            break

    return FitReport(
        order=order,
        dim=data.shape[1],
        hyperparams=hp,
        rounds=tuple(rounds),
        termination=termination,
        seed=cfg.seed,
        wall_seconds=time.perf_counter() - started,
    )


def _max_eig_over_degrees(prior: ControlPointPrior) -> float:
    return float(max(max_eigenvalue(cov) for cov in prior.covs))


def prior_to_json(prior: ControlPointPrior) -> dict:
    return {
        "order": prior.order,
        "dim": prior.dim,
        "entries": [
            {
                "degree": [int(e) for e in degree],
                "mean": [float(v) for v in mean],
                "cov": [[float(v) for v in row] for row in cov],
            }
            for degree, mean, cov in zip(prior.degrees, prior.means, prior.covs)
        ],
    }


def prior_from_json(payload: dict) -> ControlPointPrior:
    order, dim = int(payload["order"]), int(payload["dim"])
    degrees = enumerate_degrees(order, dim)
    lookup = {tuple(int(e) for e in item["degree"]): item for item in payload["entries"]}
    means = np.stack([np.asarray(lookup[tuple(d)]["mean"], float) for d in degrees.tolist()])
    covs = np.stack([np.asarray(lookup[tuple(d)]["cov"], float) for d in degrees.tolist()])
    return ControlPointPrior(order=order, dim=dim, means=means, covs=covs)


def report_to_json(report: FitReport) -> dict:
    """JSON payload: hyperparams, per-round traces, termination, seed.

    ``wall_seconds`` is included for reporting; determinism comparisons
    should ignore it (it is the only timing-dependent field).
    """
    return {
        "order": report.order,
        "dim": report.dim,
        "seed": report.seed,
        "termination": report.termination,
        "wall_seconds": report.wall_seconds,
        "hyperparams": prior_to_json(report.hyperparams),
        "rounds": [
            {
                "round": trace.round_index,
                "attempted": trace.attempted,
                "accepted": trace.accepted,
                "acceptance_rate": trace.acceptance_rate,
                "delta": trace.delta,
                "epsilon": trace.epsilon,
                "max_cov_eigenvalue": trace.max_cov_eigenvalue,
            }
            for trace in report.rounds
        ],
    }


def report_from_json(payload: dict) -> FitReport:
    hp = prior_from_json(payload["hyperparams"])
    rounds = tuple(
        AbcRoundTrace(
            round_index=int(item["round"]),
            attempted=int(item["attempted"]),
            accepted=int(item["accepted"]),
            acceptance_rate=float(item["acceptance_rate"]),
            delta=float(item["delta"]),
            epsilon=None if item["epsilon"] is None else float(item["epsilon"]),
            max_cov_eigenvalue=float(item["max_cov_eigenvalue"]),
            hyperparams=hp,  # per-round snapshots are not serialized
        )
        for item in payload["rounds"]
    )
    return FitReport(
        order=int(payload["order"]),
        dim=int(payload["dim"]),
        hyperparams=hp,
        rounds=rounds,
        termination=str(payload["termination"]),
        seed=int(payload["seed"]),
        wall_seconds=float(payload["wall_seconds"]),
    )
