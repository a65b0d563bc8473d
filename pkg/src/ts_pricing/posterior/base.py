from typing import Optional, TYPE_CHECKING
import copy

import numpy as np

if TYPE_CHECKING:
    from ts_pricing.demand import DemandEnvironment, PriceGrid


class SufficientStats:
    """
    Per (period, price) offer counts `N` and demand sums `S`. These are exact
    summaries of the observation history for all implemented likelihoods.
    """
    def __init__(
        self,
        horizon: int,
        num_prices: int,
        counts: Optional[np.ndarray] = None,
        sums: Optional[np.ndarray] = None,
    ):
        shape = (horizon, num_prices)
        if counts is None:
            counts = np.zeros(shape, dtype=np.int64)
        if sums is None:
            sums = np.zeros(shape, dtype=np.int64)
        counts = np.array(counts, dtype=np.int64)
        sums = np.array(sums, dtype=np.int64)
        if counts.shape != shape or sums.shape != shape:
            raise ValueError(
                f"stats must have shape {shape}, got {counts.shape} and {sums.shape}"
            )
        if np.any(counts < 0) or np.any(sums < 0):
            raise ValueError("stats must be non-negative")
        if np.any(sums[counts == 0] != 0):
            raise ValueError("demand sums must be zero for cells that were never offered")
        self.counts = counts
        self.sums = sums

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape

    def add(self, t: int, k: int, demand: int):
        self.counts[t - 1, k] += 1
        self.sums[t - 1, k] += demand

    @property
    def total_observations(self) -> int:
        return int(self.counts.sum())

    @property
    def visited_cells(self) -> int:
        return int(np.count_nonzero(self.counts))

    def copy(self) -> "SufficientStats":
        h, k = self.shape
        return SufficientStats(h, k, counts=self.counts.copy(), sums=self.sums.copy())

    def __eq__(self, other):
        if not isinstance(other, SufficientStats):
            return NotImplemented
        return (
            np.array_equal(self.counts, other.counts)
            and np.array_equal(self.sums, other.sums)
        )

    def __repr__(self):
        return f"<SufficientStats shape={self.shape} n={self.total_observations}>"


class PosteriorState:
    """
    Base class for the posterior over the mean-demand matrix.

    Sub-classes implement :meth:`sample_posterior`, :meth:`point_estimate`,
    :meth:`hyperparams` and :meth:`sample_environment`. A state has a single
    writer; use :meth:`clone` to get an independent copy.
    """
    family: str = ""

    def __init__(self, horizon: int, num_prices: int, stats: Optional[SufficientStats] = None):
        if horizon < 1 or num_prices < 1:
            raise ValueError(f"need a non-empty grid, got T={horizon}, K={num_prices}")
        if stats is None:
            stats = SufficientStats(horizon, num_prices)
        if stats.shape != (horizon, num_prices):
            raise ValueError(f"stats shape {stats.shape} does not match ({horizon}, {num_prices})")
        self._horizon = horizon
        self._num_prices = num_prices
        self.stats = stats

    @property
    def horizon(self) -> int:
        return self._horizon

    @property
    def num_prices(self) -> int:
        return self._num_prices

    @property
    def shutoff(self) -> int:
        return self._num_prices

    def update(self, t: int, k: int, demand: int) -> "PosteriorState":
        """
        Add one observation. Observations at the shut-off price carry no
        likelihood information and are ignored.
        """
        if k == self.shutoff:
            return self
        if not (1 <= t <= self._horizon):
            raise ValueError(f"period {t} out of range [1, {self._horizon}]")
        if not (0 <= k < self._num_prices):
            raise ValueError(f"price index {k} out of range [0, {self._num_prices})")
        if demand < 0:
            raise ValueError(f"demand must be non-negative, got {demand}")
        self.stats.add(t, k, int(demand))
        self._invalidate()
        return self

    def _invalidate(self):
        pass

    def sample_posterior(self, rng: np.random.Generator) -> np.ndarray:
        """
        Draw one `T x K` mean-demand matrix from the posterior.
        """
        raise NotImplementedError()

    def point_estimate(self) -> np.ndarray:
        """
        Mean demand evaluated at a central posterior value of the parameters.
        """
        raise NotImplementedError()

    def hyperparams(self) -> dict:
        raise NotImplementedError()

    def sample_environment(
        self, grid: "PriceGrid", rng: np.random.Generator,
    ) -> "DemandEnvironment":
        """
        Draw a true demand environment from the prior (the current stats are
        ignored). Used for Bayesian-regret estimates.
        """
        raise NotImplementedError()

    def to_dict(self) -> dict:
        return {"family": self.family, **self.hyperparams()}

    def clone(self) -> "PosteriorState":
        new = copy.copy(self)
        new.stats = self.stats.copy()
        return new

    def summary(self) -> dict:
        return {
            "family": self.family,
            "total_observations": self.stats.total_observations,
            "visited_cells": self.stats.visited_cells,
            "point_estimate": self.point_estimate().tolist(),
        }

    def __repr__(self):
        return f"<{self.__class__.__name__} {self.hyperparams()} stats={self.stats!r}>"
