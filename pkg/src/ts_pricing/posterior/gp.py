"""
Gaussian-process prior on the log-intensity with a Poisson likelihood,
approximated by a Laplace fit around the posterior mode.
"""
from typing import NamedTuple, Optional
import logging

import numpy as np
from scipy import linalg
from opentelemetry import trace

from ts_pricing.common import LaplaceFitError
from ts_pricing.demand import DemandEnvironment, PriceGrid
from .base import PosteriorState, SufficientStats

logger = logging.getLogger(__name__)
tracer = trace.get_tracer(__name__)

MAX_ITER = 50
MAX_HALVINGS = 30
MAX_JITTER = 1e-2
DEFAULT_JITTER = 1e-6
REL_OBJECTIVE_TOL = 1e-10
GRADIENT_TOL = 1e-8
STRICT_GRADIENT_TOL = 1e-10


def grid_points(grid: PriceGrid, horizon: int) -> np.ndarray:
    """
    The `T * K` points `(t, p_k)` in row-major order: the point of cell
    `(t, k)` is at index `(t - 1) * K + k`.
    """
    t = np.repeat(np.arange(1, horizon + 1, dtype=np.float64), grid.num_prices)
    p = np.tile(grid.prices, horizon)
    return np.stack([t, p], axis=1)


def _rbf(points: np.ndarray, sigma_t: float, sigma_p: float) -> np.ndarray:
    dt = points[:, np.newaxis, 0] - points[np.newaxis, :, 0]
    dp = points[:, np.newaxis, 1] - points[np.newaxis, :, 1]
    return np.exp(-(dt * dt) / sigma_t**2 - (dp * dp) / sigma_p**2)


def jittered_cholesky(
    base: np.ndarray, jitter: float, max_jitter: float = MAX_JITTER,
) -> tuple[np.ndarray, np.ndarray, float]:
    """
    Add `jitter` to the diagonal of `base` and factorize, escalating the
    jitter by a factor of ten until the Cholesky factorization succeeds.

    Returns the jittered matrix, its lower Cholesky factor and the jitter
    that was used.
    """
    n = base.shape[0]
    current = jitter
    while True:
        matrix = base + current * np.eye(n)
        try:
            chol = linalg.cholesky(matrix, lower=True)
            if current > jitter:
                logger.warning("kernel needed jitter %g (requested %g)", current, jitter)
            return matrix, chol, current
        except linalg.LinAlgError:
            pass
        nxt = DEFAULT_JITTER if current <= 0 else current * 10
        if nxt > max_jitter * (1 + 1e-12):
            raise LaplaceFitError(
                f"kernel matrix is not positive definite even with jitter {current:g}",
                jitter=current,
            )
        logger.debug("Cholesky failed with jitter %g, escalating to %g", current, nxt)
        current = nxt


def kernel_matrix(
    grid: PriceGrid,
    horizon: int,
    sigma_t: float,
    sigma_p: float,
    jitter: float = DEFAULT_JITTER,
) -> np.ndarray:
    '''
    Anisotropic RBF kernel over the (period, price) grid,
    :code:`exp(-(t-t')**2/sigma_t**2 - (p-p')**2/sigma_p**2)`, with `jitter`
    on the diagonal (escalated if needed so the matrix factorizes).

    Examples
    --------

    >>> grid = PriceGrid([1.0, 2.0])
    >>> K = kernel_matrix(grid, horizon=4, sigma_t=3, sigma_p=2.5, jitter=1e-6)
    >>> K.shape
    (8, 8)
    >>> round(float(K[0, 0]), 9)
    1.000001
    '''
    if not (sigma_t > 0 and sigma_p > 0):
        raise ValueError(
            f"kernel scales must be positive, got sigma_t={sigma_t}, sigma_p={sigma_p}"
        )
    if jitter < 0:
        raise ValueError(f"jitter must be non-negative, got {jitter}")
    base = _rbf(grid_points(grid, horizon), sigma_t, sigma_p)
    matrix, _, _ = jittered_cholesky(base, jitter)
    return matrix


class LaplaceFit(NamedTuple):
    """
    Gaussian approximation `Normal(mode, factor @ factor.T)` of the posterior
    over the flattened log-intensities.
    """
    mode: np.ndarray
    factor: np.ndarray
    iterations: int
    objective_history: list[float]
    gradient_norm: float
    jitter: float

    def covariance(self) -> np.ndarray:
        return self.factor @ self.factor.T

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        z = rng.standard_normal(self.mode.shape[0])
        return self.mode + self.factor @ z


def _rate(g, counts):
    # cells without offers contribute nothing, even where exp(g) overflows
    with np.errstate(over='ignore', invalid='ignore'):
        return np.where(counts > 0, counts * np.exp(g), 0.0)


def _objective(g, v, counts, sums):
    with np.errstate(invalid='ignore'):
        value = float(np.dot(sums, g) - _rate(g, counts).sum() - 0.5 * np.dot(v, v))
    if np.isnan(value):
        return -np.inf
    return value


def laplace_fit(
    kernel_chol: np.ndarray,
    mean_vec: np.ndarray,
    counts: np.ndarray,
    sums: np.ndarray,
    jitter: float = float('nan'),
    start: Optional[np.ndarray] = None,
    max_iter: int = MAX_ITER,
) -> LaplaceFit:
    '''
    Newton's method for the mode of

    :code:`sum(S * g - N * exp(g)) - 0.5 (g - m)^T K^-1 (g - m)`

    in whitened coordinates `g = m + L v` with `K = L L^T`. Each step solves
    with :code:`C = I + L^T W L`, `W = diag(N exp(g))`, halving the step
    while the objective would decrease.

    All vectors are flattened `T * K` cells; `start` is an initial guess for
    `g`.
    '''
    chol = kernel_chol
    n = mean_vec.shape[0]
    counts = counts.astype(np.float64)
    sums = sums.astype(np.float64)
    if start is None:
        v = np.zeros(n)
    else:
        v = linalg.solve_triangular(chol, start - mean_vec, lower=True)

    g = mean_vec + chol @ v
    psi = _objective(g, v, counts, sums)
    history = [psi]
    grad_norm = float('nan')
    chol_c = np.eye(n)

    for it in range(max_iter + 1):
        rate = _rate(g, counts)
        grad_g = (sums - rate) - linalg.solve_triangular(chol, v, lower=True, trans='T')
        grad_norm = float(np.linalg.norm(grad_g))
        c_matrix = np.eye(n) + chol.T @ (rate[:, np.newaxis] * chol)
        try:
            chol_c = linalg.cholesky(c_matrix, lower=True)
        except linalg.LinAlgError:
            raise LaplaceFitError(
                "Newton system is not positive definite",
                iterations=it, objective_history=history,
                gradient_norm=grad_norm, jitter=jitter,
            ) from None

        if len(history) >= 2:
            change = abs(history[-1] - history[-2])
            small_change = change <= REL_OBJECTIVE_TOL * max(1.0, abs(history[-1]))
        else:
            small_change = False
        if grad_norm < STRICT_GRADIENT_TOL or (small_change and grad_norm < GRADIENT_TOL):
            break
        if it == max_iter:
            raise LaplaceFitError(
                f"Newton iteration did not converge in {max_iter} steps "
                f"(gradient norm {grad_norm:.3e})",
                iterations=it, objective_history=history,
                gradient_norm=grad_norm, jitter=jitter,
            )

        grad_v = chol.T @ grad_g
        step = linalg.cho_solve((chol_c, True), grad_v)
        # accept steps that lose no more than rounding noise
        slack = 4 * np.finfo(np.float64).eps * max(1.0, abs(psi))
        scale = 1.0
        for _ in range(MAX_HALVINGS):
            v_new = v + scale * step
            g_new = mean_vec + chol @ v_new
            psi_new = _objective(g_new, v_new, counts, sums)
            if psi_new >= psi - slack:
                break
            scale *= 0.5
        else:
            raise LaplaceFitError(
                "Newton step decreased the objective at every step size",
                iterations=it, objective_history=history,
                gradient_norm=grad_norm, jitter=jitter,
            )
        v, g, psi = v_new, g_new, psi_new
        history.append(psi)
        logger.debug("laplace iteration %d: objective %.12g, step scale %g", it, psi, scale)

    # posterior covariance (K^-1 + W)^-1 = L C^-1 L^T = F F^T, F = L C^-T
    factor = linalg.solve_triangular(chol_c, chol.T, lower=True).T
    return LaplaceFit(
        mode=g,
        factor=factor,
        iterations=len(history) - 1,
        objective_history=history,
        gradient_norm=grad_norm,
        jitter=jitter,
    )


class GPLaplacePosterior(PosteriorState):
    '''
    GP prior :code:`g ~ Normal(m, K)` on the log-intensities `g = log(lambda)`
    of all cells, with a Poisson likelihood.

    Parameters
    ----------
    grid, horizon
        The (period, price) grid the GP is defined on
    sigma_t, sigma_p
        Length scales of the RBF kernel
    jitter
        Diagonal jitter of the kernel; escalated if the Cholesky fails
    mean
        Constant prior mean of the log-intensity
    kernel
        Explicit `TK x TK` prior covariance replacing the RBF kernel
    '''
    family = "gp"

    def __init__(
        self,
        grid: PriceGrid,
        horizon: int,
        sigma_t: float,
        sigma_p: float,
        jitter: float = DEFAULT_JITTER,
        mean: float = 0.0,
        kernel: Optional[np.ndarray] = None,
        stats: Optional[SufficientStats] = None,
    ):
        super().__init__(horizon, grid.num_prices, stats)
        if not (sigma_t > 0 and sigma_p > 0):
            raise ValueError(
                f"kernel scales must be positive, got sigma_t={sigma_t}, sigma_p={sigma_p}"
            )
        if jitter < 0:
            raise ValueError(f"jitter must be non-negative, got {jitter}")
        n = horizon * grid.num_prices
        if kernel is None:
            base = _rbf(grid_points(grid, horizon), sigma_t, sigma_p)
        else:
            base = np.array(kernel, dtype=np.float64)
            if base.shape != (n, n):
                raise ValueError(f"kernel must have shape ({n}, {n}), got {base.shape}")
        self._kernel, self._chol, self._jitter = jittered_cholesky(base, jitter)
        self.grid = grid
        self.sigma_t = float(sigma_t)
        self.sigma_p = float(sigma_p)
        self.requested_jitter = float(jitter)
        self.mean = float(mean)
        self._explicit_kernel = kernel is not None
        self._mean_vec = np.full(n, self.mean)
        self._fit: Optional[LaplaceFit] = None
        self._last_mode: Optional[np.ndarray] = None

    @property
    def kernel(self) -> np.ndarray:
        return self._kernel

    @property
    def jitter(self) -> float:
        return self._jitter

    @property
    def cache_valid(self) -> bool:
        return self._fit is not None

    def _invalidate(self):
        self._fit = None

    def fit(self) -> LaplaceFit:
        if self._fit is not None:
            logger.debug("reusing cached Laplace fit")
            return self._fit
        self._fit = gp_laplace_fit(self)
        self._last_mode = self._fit.mode
        return self._fit

    def sample_log_intensity(self, rng: np.random.Generator) -> np.ndarray:
        return self.fit().sample(rng)

    def sample_posterior(self, rng: np.random.Generator) -> np.ndarray:
        g = self.sample_log_intensity(rng)
        return np.exp(g).reshape((self.horizon, self.num_prices))

    def point_estimate(self) -> np.ndarray:
        return np.exp(self.fit().mode).reshape((self.horizon, self.num_prices))

    def hyperparams(self) -> dict:
        return {
            "sigma_t": self.sigma_t,
            "sigma_p": self.sigma_p,
            "jitter": self.requested_jitter,
            "mean": self.mean,
        }

    def sample_environment(self, grid: PriceGrid, rng: np.random.Generator) -> DemandEnvironment:
        g = self._mean_vec + self._chol @ rng.standard_normal(self._mean_vec.shape[0])
        lam = np.exp(g).reshape((self.horizon, self.num_prices))
        return DemandEnvironment(family='poisson', grid=grid, params=lam)


def gp_laplace_fit(state: GPLaplacePosterior) -> LaplaceFit:
    """
    Fit the Laplace approximation for the current statistics of `state`,
    warm-starting from the previous mode when one is available.
    """
    with tracer.start_as_current_span("gp_laplace_fit") as span:
        fit = laplace_fit(
            kernel_chol=state._chol,
            mean_vec=state._mean_vec,
            counts=state.stats.counts.ravel(),
            sums=state.stats.sums.ravel(),
            jitter=state.jitter,
            start=state._last_mode,
        )
        span.set_attributes({
            "ts_pricing.gp.cells": int(state._mean_vec.shape[0]),
            "ts_pricing.gp.iterations": fit.iterations,
            "ts_pricing.gp.observations": state.stats.total_observations,
        })
    return fit
