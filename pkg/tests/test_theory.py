"""Toy posteriors, the 1-D distance shortcut, and the scaling scans."""

import math

import numpy as np
import pytest

from bezierabc.theory import (
    GaussianToy,
    ProposalBudgetError,
    UniformToy,
    acceptance_scan,
    ball_volume,
    bias_scan,
    default_bias_delta_grid,
    exact_posterior_mean_gaussian,
    exact_posterior_mean_uniform,
    fit_loglog,
    middle_slice,
    toy_model,
    wabc_toy_estimate,
    wasserstein2_1d,
)
from bezierabc.transport import wasserstein2


class TestGaussianPosterior:
    def test_zero_data(self):
        assert exact_posterior_mean_gaussian([0.0, 0.0, 0.0]) == 0.0

    def test_single_observation(self):
        assert exact_posterior_mean_gaussian([4.0]) == 2.0

    def test_matches_importance_sampling_oracle(self):
        rng = np.random.default_rng(0)
        data = rng.normal(-1.5, 1.0, size=6)
        thetas = rng.standard_normal(1_000_000)  # proposal = prior
        logw = -0.5 * ((data[None, :] - thetas[:, None]) ** 2).sum(axis=1)
        w = np.exp(logw - logw.max())
        w /= w.sum()
        estimate = float((w * thetas).sum())
        stderr = float(np.sqrt((w**2 * (thetas - estimate) ** 2).sum()))
        exact = exact_posterior_mean_gaussian(data)
        assert abs(estimate - exact) < 3 * stderr


class TestUniformPosterior:
    def test_concentrates_at_max_for_large_n(self):
        data = np.linspace(1e-4, 1.0, 10_000)
        assert exact_posterior_mean_uniform(data) == pytest.approx(1.0, abs=1e-2)

    def test_matches_trapezoid_oracle_n2(self):
        data = np.array([0.4, 1.0])
        theta = np.linspace(1.0, 8.5, 2_000_001)
        weights = np.exp(-0.5 * theta**2)
        oracle = np.trapezoid(weights / theta, theta) / np.trapezoid(
            weights / theta**2, theta
        )
        assert exact_posterior_mean_uniform(data) == pytest.approx(oracle, abs=1e-8)

    def test_always_greater_than_one(self):
        rng = np.random.default_rng(1)
        for n in (1, 2, 5, 50):
            u = rng.random(n)
            data = u / u.max()
            assert exact_posterior_mean_uniform(data) > 1.0

    def test_support_assumption_enforced(self):
        with pytest.raises(ValueError):
            exact_posterior_mean_uniform([0.2, 0.9])  # max != 1
        with pytest.raises(ValueError):
            exact_posterior_mean_uniform([-0.1, 1.0])


class TestSorted1dShortcut:
    def test_matches_assignment_solver(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            n = int(rng.integers(2, 51))
            x, y = rng.normal(size=n), rng.normal(size=n)
            shortcut = wasserstein2_1d(x, y)
            general = wasserstein2(x[:, None], y[:, None])
            assert shortcut == pytest.approx(general, abs=1e-12)

    def test_size_mismatch_rejected(self):
        with pytest.raises(ValueError):
            wasserstein2_1d([1.0, 2.0], [1.0])


class TestToyEstimate:
    def test_infinite_delta_recovers_prior_mean(self):
        toy = GaussianToy()
        data = toy.draw_data(50, np.random.default_rng(3))
        estimate = wabc_toy_estimate(toy, data, np.inf, 4000, np.random.default_rng(4))
        assert abs(estimate) < 5 / math.sqrt(4000)  # prior mean 0, sd 1

    def test_small_delta_approaches_exact_posterior(self):
        toy = GaussianToy()
        data = toy.draw_data(60, np.random.default_rng(5))
        exact = toy.posterior_mean(data)
        coarse = wabc_toy_estimate(toy, data, 1.0, 1000, np.random.default_rng(6))
        fine = wabc_toy_estimate(toy, data, 0.2, 1000, np.random.default_rng(6))
        assert abs(fine - exact) < abs(coarse - exact)
        assert abs(fine - exact) < 0.1

    def test_budget_exhaustion_raises_with_attempt_count(self):
        toy = GaussianToy()
        data = toy.draw_data(30, np.random.default_rng(7))
        with pytest.raises(ProposalBudgetError) as err:
            wabc_toy_estimate(toy, data, 1e-6, 10, np.random.default_rng(8),
                              max_proposals=5000)
        assert err.value.attempted == 5000

    def test_posterior_concentration_majority_vote(self):
        # |accepted mean - exact posterior mean| decreases with delta,
        # checked over a 4-point grid with 10 seeds by majority vote
        toy = GaussianToy()
        grid = np.array([0.3, 0.6, 1.2, 2.4])
        votes = 0
        for seed in range(10):
            rng = np.random.default_rng(100 + seed)
            data = toy.draw_data(30, rng)
            exact = toy.posterior_mean(data)
            biases = [
                abs(wabc_toy_estimate(toy, data, d, 400, rng) - exact) for d in grid
            ]
            votes += all(a <= b for a, b in zip(biases, biases[1:]))
        assert votes > 5


class TestBallVolume:
    def test_known_values(self):
        assert ball_volume(2, 1.0) == pytest.approx(math.pi, rel=1e-12)
        assert ball_volume(3, 1.0) == pytest.approx(4 * math.pi / 3, rel=1e-12)
        assert ball_volume(1, 2.0) == pytest.approx(4.0, rel=1e-12)

    def test_recurrence(self):
        for q in range(3, 30):
            for delta in (0.1, 1.0, 3.7):
                expected = ball_volume(q - 2, delta) * 2 * math.pi * delta**2 / q
                assert ball_volume(q, delta) == pytest.approx(expected, rel=1e-12)

    def test_degenerate_inputs(self):
        assert ball_volume(5, 0.0) == 0.0
        with pytest.raises(ValueError):
            ball_volume(0, 1.0)


class TestBiasScan:
    def test_default_grid_shape(self):
        grid = default_bias_delta_grid()
        assert len(grid) == 13
        assert grid[0] == pytest.approx(0.1) and grid[-1] == pytest.approx(10**0.5)

    def test_middle_slice_drops_twenty_percent(self):
        assert middle_slice(13) == slice(3, 10)
        assert middle_slice(10) == slice(2, 8)

    def test_grid_validation(self):
        toy = GaussianToy()
        with pytest.raises(ValueError):
            bias_scan(toy, delta_grid=np.array([0.1, 0.2, 0.3]))  # too few points
        with pytest.raises(ValueError):
            bias_scan(toy, delta_grid=np.linspace(0.5, 1.0, 6))  # under one decade

    def test_doubling_grid_keeps_slope(self):
        toy = GaussianToy()
        grid = np.logspace(-0.7, 0.4, 6)
        kwargs = dict(n=20, n_abc=300, trials=3, max_proposals_per_trial=400_000)
        rep1 = bias_scan(toy, delta_grid=grid, rng=np.random.default_rng(9), **kwargs)
        rep2 = bias_scan(toy, delta_grid=2 * grid, rng=np.random.default_rng(9), **kwargs)
        assert rep1.slope_all_mean == pytest.approx(rep2.slope_all_mean, abs=0.6)

    def test_scale_homogeneity_is_exact(self):
        # doubling the toy's scale and the grid multiplies every accepted
        # draw by exactly two (doubling is exact in binary floating point),
        # so the measured biases double bitwise and the log-log slopes agree
        # up to rounding inside the logarithms
        grid = np.logspace(-0.7, 0.4, 6)
        kwargs = dict(n=15, n_abc=200, trials=2, max_proposals_per_trial=200_000)
        rep1 = bias_scan(GaussianToy(), delta_grid=grid,
                         rng=np.random.default_rng(10), **kwargs)
        rep2 = bias_scan(GaussianToy(scale=2.0), delta_grid=2 * grid,
                         rng=np.random.default_rng(10), **kwargs)
        np.testing.assert_array_equal(rep2.biases, 2.0 * rep1.biases)
        np.testing.assert_allclose(rep1.slopes_all, rep2.slopes_all, rtol=1e-12)
        np.testing.assert_allclose(rep1.slopes_middle, rep2.slopes_middle, rtol=1e-12)

    def test_toy_factory(self):
        assert isinstance(toy_model("gaussian"), GaussianToy)
        assert isinstance(toy_model("uniform"), UniformToy)
        with pytest.raises(ValueError):
            toy_model("cauchy")


class TestAcceptanceScan:
    def test_rates_monotone_and_saturating(self):
        toy = GaussianToy()
        grid = np.array([0.05, 0.1, 0.3, 1.0, 1e12])
        rep = acceptance_scan(toy, 2, grid, 20_000, np.random.default_rng(11))
        assert (np.diff(rep.rates) >= 0).all()  # shared stream: exactly nested
        assert rep.rates[-1] == 1.0

    def test_slope_matches_dimension_prediction(self):
        toy = GaussianToy()
        grid = np.logspace(-1.5, 0.0, 7)
        rep = acceptance_scan(toy, 2, grid, 200_000, np.random.default_rng(12))
        assert rep.slope == pytest.approx(2.0, abs=0.3)  # q = n*M = 2

    def test_zero_cells_flagged_and_excluded(self):
        toy = GaussianToy()
        grid = np.array([1e-9, 0.5, 1.0, 2.0])
        rep = acceptance_scan(toy, 2, grid, 10_000, np.random.default_rng(13))
        assert rep.flagged[0]
        assert np.isfinite(rep.slope)

    def test_too_few_proposals_rejected(self):
        with pytest.raises(ValueError):
            acceptance_scan(GaussianToy(), 2, np.array([0.5, 1.0]), 100,
                            np.random.default_rng(14))


class TestLogLogFit:
    def test_recovers_power_law(self):
        x = np.logspace(-1, 1, 20)
        slope, intercept = fit_loglog(x, 3.0 * x**2.5)
        assert slope == pytest.approx(2.5, rel=1e-12)
        assert intercept == pytest.approx(math.log(3.0), rel=1e-9)
