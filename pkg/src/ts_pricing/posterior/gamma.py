from typing import Optional

import numpy as np

from ts_pricing.demand import DemandEnvironment, PriceGrid
from .base import PosteriorState, SufficientStats


class IndependentGammaPosterior(PosteriorState):
    '''
    Independent Gamma priors on the Poisson intensity of every cell.

    The prior is written in shape/scale form, :code:`Gamma(alpha, beta)` with
    mean `alpha * beta`. After `N` offers with total demand `S` the cell
    posterior is :code:`Gamma(alpha + S, beta / (1 + N * beta))`.

    Examples
    --------

    >>> post = IndependentGammaPosterior(horizon=1, num_prices=1, alpha=10, beta=1)
    >>> post.update(1, 0, 4).update(1, 0, 7).cell_posterior(1, 0)
    (21.0, 0.3333333333333333)
    '''
    family = "gamma"

    def __init__(
        self,
        horizon: int,
        num_prices: int,
        alpha: float,
        beta: float,
        stats: Optional[SufficientStats] = None,
    ):
        if not (alpha > 0 and beta > 0):
            raise ValueError(f"alpha and beta must be positive, got alpha={alpha}, beta={beta}")
        super().__init__(horizon, num_prices, stats)
        self.alpha = float(alpha)
        self.beta = float(beta)

    def posterior_params(self) -> tuple[np.ndarray, np.ndarray]:
        shape = self.alpha + self.stats.sums
        scale = self.beta / (1 + self.stats.counts * self.beta)
        return shape, scale

    def cell_posterior(self, t: int, k: int) -> tuple[float, float]:
        shape, scale = self.posterior_params()
        return float(shape[t - 1, k]), float(scale[t - 1, k])

    def sample_posterior(self, rng: np.random.Generator) -> np.ndarray:
        shape, scale = self.posterior_params()
        return rng.gamma(shape, scale)

    def point_estimate(self) -> np.ndarray:
        shape, scale = self.posterior_params()
        return shape * scale

    def hyperparams(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta}

    def sample_environment(self, grid: PriceGrid, rng: np.random.Generator) -> DemandEnvironment:
        lam = rng.gamma(self.alpha, self.beta, size=(self.horizon, self.num_prices))
        # a zero draw is possible for tiny alpha; the environment needs lambda > 0
        lam = np.maximum(lam, np.finfo(np.float64).tiny)
        return DemandEnvironment(family='poisson', grid=grid, params=lam)
