import logging

import numpy as np
from numpy.testing import assert_allclose
import pytest
from scipy import linalg, optimize

from ts_pricing.common import LaplaceFitError
from ts_pricing.demand import DemandEnvironment, PriceGrid
from ts_pricing.posterior import (
    GPLaplacePosterior, SufficientStats, kernel_matrix, make_posterior,
)
from ts_pricing.posterior.gp import grid_points, jittered_cholesky, laplace_fit

from utils import feed_observations


def _objective(post: GPLaplacePosterior, g):
    counts = post.stats.counts.ravel()
    sums = post.stats.sums.ravel()
    diff = g - post.mean
    quad = diff @ linalg.cho_solve(linalg.cho_factor(post.kernel, lower=True), diff)
    return float(sums @ g - counts @ np.exp(g) - 0.5 * quad)


def _gradient(post: GPLaplacePosterior, g):
    counts = post.stats.counts.ravel()
    sums = post.stats.sums.ravel()
    prior = linalg.cho_solve(linalg.cho_factor(post.kernel, lower=True), g - post.mean)
    return sums - counts * np.exp(g) - prior


def _random_stats(rng, horizon, num_prices):
    counts = rng.integers(0, 20, size=(horizon, num_prices))
    counts[rng.random((horizon, num_prices)) < 0.3] = 0
    sums = rng.poisson(rng.uniform(0.5, 30, size=counts.shape) * counts)
    return SufficientStats(horizon, num_prices, counts=counts, sums=sums)


def test_grid_points_order():
    points = grid_points(PriceGrid([1.0, 5.0]), horizon=2)
    assert points.tolist() == [[1.0, 1.0], [1.0, 5.0], [2.0, 1.0], [2.0, 5.0]]


def test_kernel_entries():
    grid = PriceGrid([1.0, 2.0])
    K = kernel_matrix(grid, horizon=4, sigma_t=3, sigma_p=2.5, jitter=1e-6)
    assert K.shape == (8, 8)
    assert_allclose(np.diag(K), 1 + 1e-6, rtol=1e-15)
    # (t, p) = (1, 1) vs (4, 1)
    assert_allclose(K[0, 6], np.exp(-1), rtol=1e-15)
    # (1, 1) vs (1, 2)
    assert_allclose(K[0, 1], np.exp(-1 / 2.5**2), rtol=1e-15)
    assert np.array_equal(K, K.T)
    linalg.cholesky(K, lower=True)


def test_kernel_invalid():
    with pytest.raises(ValueError) as m:
        kernel_matrix(PriceGrid([1.0]), horizon=2, sigma_t=0, sigma_p=1)
    m.match(r'^kernel scales must be positive')
    with pytest.raises(ValueError) as m:
        kernel_matrix(PriceGrid([1.0]), horizon=2, sigma_t=1, sigma_p=1, jitter=-1)
    m.match(r'^jitter must be non-negative')


def test_jitter_escalation(caplog):
    with caplog.at_level(logging.WARNING, logger='ts_pricing.posterior.gp'):
        matrix, chol, jitter = jittered_cholesky(np.ones((3, 3)), 0.0)
    assert jitter == 1e-6
    assert_allclose(chol @ chol.T, matrix)
    assert "kernel needed jitter" in caplog.text


def test_jitter_exhausted():
    with pytest.raises(LaplaceFitError) as m:
        jittered_cholesky(-np.eye(2), 1e-6)
    m.match(r'^kernel matrix is not positive definite')
    assert m.value.jitter == pytest.approx(1e-2)


def test_no_data_recovers_prior():
    grid = PriceGrid([1.0, 2.0, 3.0])
    post = GPLaplacePosterior(grid, horizon=3, sigma_t=3, sigma_p=2.5, mean=0.5)
    fit = post.fit()
    assert_allclose(fit.mode, 0.5)
    assert fit.iterations == 0
    assert_allclose(fit.covariance(), post.kernel, atol=1e-12)
    assert_allclose(np.diag(fit.covariance()), 1 + 1e-6, rtol=1e-12)


def test_no_data_marginal_variance():
    rng = np.random.default_rng(5)
    grid = PriceGrid([1.0, 2.0])
    post = make_posterior('gp', grid=grid, horizon=2, sigma_t=3, sigma_p=2.5)
    num = 10_000
    g = np.stack([post.sample_log_intensity(rng) for _ in range(num)])
    assert np.all(np.abs(g.mean(axis=0)) < 4 / np.sqrt(num))
    assert np.all(np.abs(g.var(axis=0, ddof=1) - 1) < 4 * np.sqrt(2 / num))
    # one fit serves all samples
    assert post.cache_valid


def test_single_cell_identity_kernel():
    grid = PriceGrid([1.0, 2.0])
    horizon = 2
    n = horizon * grid.num_prices
    counts = np.zeros((horizon, 2), dtype=np.int64)
    sums = np.zeros((horizon, 2), dtype=np.int64)
    counts[1, 0] = 10
    sums[1, 0] = 20
    post = GPLaplacePosterior(
        grid, horizon, sigma_t=1, sigma_p=1, jitter=0.0, kernel=np.eye(n),
        stats=SufficientStats(horizon, 2, counts=counts, sums=sums),
    )
    fit = post.fit()
    root = optimize.bisect(lambda g: 20 - 10 * np.exp(g) - g, 0.0, 2.0, xtol=1e-14)
    assert_allclose(fit.mode[2], root, atol=1e-9)
    # cells without data stay at the prior mean
    assert_allclose(fit.mode[[0, 1, 3]], 0.0, atol=1e-12)
    assert_allclose(fit.covariance()[2, 2], 1 / (1 + 10 * np.exp(root)), rtol=1e-8)


@pytest.mark.parametrize('seed', range(50))
def test_mode_gradient(seed):
    rng = np.random.default_rng(seed)
    grid = PriceGrid([1.0, 2.0, 4.0])
    horizon = 3
    post = GPLaplacePosterior(
        grid, horizon, sigma_t=3, sigma_p=2.5, mean=float(rng.normal()),
        stats=_random_stats(rng, horizon, 3),
    )
    fit = post.fit()
    assert fit.gradient_norm < 1e-8
    grad = _gradient(post, fit.mode)
    h = 1e-5
    fd = np.zeros_like(grad)
    for i in range(grad.shape[0]):
        e = np.zeros_like(grad)
        e[i] = h
        fd[i] = (_objective(post, fit.mode + e) - _objective(post, fit.mode - e)) / (2 * h)
    assert np.max(np.abs(fd - grad)) < 1e-4
    assert np.max(np.abs(fd)) < 1e-4
    # Newton never goes downhill
    history = np.array(fit.objective_history)
    slack = 1e-12 * np.maximum(1, np.abs(history[:-1]))
    assert np.all(np.diff(history) >= -slack)
    cov = fit.covariance()
    assert_allclose(cov, cov.T, atol=1e-14)
    np.linalg.cholesky(cov)


def test_cache_invalidation():
    grid = PriceGrid([1.0, 2.0])
    post = GPLaplacePosterior(grid, 2, sigma_t=3, sigma_p=2.5)
    fit = post.fit()
    assert post.cache_valid
    assert post.fit() is fit
    post.update(1, 0, 3)
    assert not post.cache_valid
    refit = post.fit()
    assert refit is not fit
    assert refit.mode[0] > 0
    # shut-off observations do not touch the cache
    post.update(1, 2, 0)
    assert post.cache_valid


def test_newton_failure_diagnostics():
    grid = PriceGrid([1.0, 2.0])
    post = GPLaplacePosterior(grid, 2, sigma_t=3, sigma_p=2.5)
    post.update(1, 0, 40)
    with pytest.raises(LaplaceFitError) as m:
        laplace_fit(
            kernel_chol=post._chol,
            mean_vec=np.zeros(4),
            counts=post.stats.counts.ravel(),
            sums=post.stats.sums.ravel(),
            jitter=post.jitter,
            max_iter=0,
        )
    m.match(r'^Newton iteration did not converge in 0 steps')
    assert m.value.iterations == 0
    assert len(m.value.objective_history) == 1
    assert m.value.gradient_norm > 1


def test_concentration():
    rng = np.random.default_rng(12)
    grid = PriceGrid([1.0, 2.0, 3.0])
    horizon = 2
    env = DemandEnvironment('poisson', grid, rng.uniform(10, 40, size=(horizon, 3)))
    post = GPLaplacePosterior(grid, horizon, sigma_t=3, sigma_p=2.5)
    feed_observations(post, env, 10_000, rng)
    sample_mean = np.mean([post.sample_posterior(rng) for _ in range(20)], axis=0)
    assert_allclose(sample_mean, env.mean_demand(), rtol=0.02)


def test_samples_positive(rng):
    grid = PriceGrid([1.0, 2.0])
    post = GPLaplacePosterior(grid, 3, sigma_t=3, sigma_p=2.5)
    post.update(2, 1, 7)
    sample = post.sample_posterior(rng)
    assert sample.shape == (3, 2)
    assert np.all(sample > 0)
    assert post.point_estimate().shape == (3, 2)


def test_hyperparams_and_environment(rng):
    grid = PriceGrid([1.0, 2.0])
    post = GPLaplacePosterior(grid, 3, sigma_t=3, sigma_p=2.5)
    assert post.to_dict() == {
        'family': 'gp', 'sigma_t': 3.0, 'sigma_p': 2.5, 'jitter': 1e-6, 'mean': 0.0,
    }
    env = post.sample_environment(grid, rng)
    assert env.family == 'poisson'
    assert env.params.shape == (3, 2)


def test_explicit_kernel_shape():
    with pytest.raises(ValueError) as m:
        GPLaplacePosterior(PriceGrid([1.0]), 2, sigma_t=1, sigma_p=1, kernel=np.eye(3))
    m.match(r'^kernel must have shape \(2, 2\)')
