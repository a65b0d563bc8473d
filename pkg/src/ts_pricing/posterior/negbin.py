from typing import Optional
import logging

import numpy as np

from ts_pricing.common import PosteriorSamplingError
from ts_pricing.demand import DemandEnvironment, PriceGrid
from .base import PosteriorState, SufficientStats

logger = logging.getLogger(__name__)

# smallest success probability we accept from the Beta posterior; the mean
# r (1 - q) / q blows up as q -> 0
MIN_Q = 1e-12
MAX_REDRAWS = 100


class BetaNegBinPosterior(PosteriorState):
    '''
    Independent Beta priors on the success probability `q` of a negative
    binomial demand with known failure count `r`.

    The likelihood of `N` observations with total demand `S` is proportional
    to :code:`q**(r*N) * (1-q)**S`, so the cell posterior is
    :code:`Beta(a + r*N, b + S)`. Samples are returned as mean demand
    `r (1 - q) / q`.
    '''
    family = "beta-negbin"

    def __init__(
        self,
        horizon: int,
        num_prices: int,
        a: float,
        b: float,
        r: float,
        stats: Optional[SufficientStats] = None,
    ):
        if not (a > 0 and b > 0 and r > 0):
            raise ValueError(f"a, b and r must be positive, got a={a}, b={b}, r={r}")
        super().__init__(horizon, num_prices, stats)
        self.a = float(a)
        self.b = float(b)
        self.r = float(r)

    def posterior_params(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            self.a + self.r * self.stats.counts,
            self.b + self.stats.sums,
        )

    def cell_posterior(self, t: int, k: int) -> tuple[float, float]:
        a, b = self.posterior_params()
        return float(a[t - 1, k]), float(b[t - 1, k])

    def sample_q(self, rng: np.random.Generator) -> np.ndarray:
        a, b = self.posterior_params()
        q = rng.beta(a, b)
        for _ in range(MAX_REDRAWS):
            bad = q < MIN_Q
            if not np.any(bad):
                return q
            logger.debug("redrawing %d tiny success probabilities", np.count_nonzero(bad))
            q[bad] = rng.beta(a[bad], b[bad])
        if np.any(q < MIN_Q):
            raise PosteriorSamplingError(
                f"Beta posterior kept producing success probabilities below {MIN_Q} "
                f"after {MAX_REDRAWS} redraws"
            )
        return q

    def sample_posterior(self, rng: np.random.Generator) -> np.ndarray:
        q = self.sample_q(rng)
        return self.r * (1 - q) / q

    def point_estimate(self) -> np.ndarray:
        a, b = self.posterior_params()
        q = a / (a + b)
        return self.r * (1 - q) / q

    def hyperparams(self) -> dict:
        return {"a": self.a, "b": self.b, "r": self.r}

    def sample_environment(self, grid: PriceGrid, rng: np.random.Generator) -> DemandEnvironment:
        shape = (self.horizon, self.num_prices)
        q = rng.beta(self.a, self.b, size=shape)
        # the environment needs q strictly inside (0, 1)
        eps = np.finfo(np.float64).eps
        q = np.clip(q, MIN_Q, 1 - eps)
        return DemandEnvironment(family='negbin', grid=grid, params=q, r=self.r)
