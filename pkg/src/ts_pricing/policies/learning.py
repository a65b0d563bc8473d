"""
Thompson-sampling policies that learn the demand law from a posterior.
"""
from ts_pricing.demand import PriceGrid
from ts_pricing.posterior import PosteriorState
from .base import Policy


class LearningPolicy(Policy):
    is_learning = True

    def __init__(self, grid: PriceGrid, horizon: int, posterior: PosteriorState):
        super().__init__(grid, horizon)
        if posterior.horizon != horizon or posterior.num_prices != grid.num_prices:
            raise ValueError(
                f"posterior covers ({posterior.horizon}, {posterior.num_prices}) cells, "
                f"need ({horizon}, {grid.num_prices})"
            )
        self.posterior = posterior

    def observe(self, t: int, k: int, demand: int) -> "LearningPolicy":
        self.posterior.update(t, k, demand)
        return self

    def summary(self) -> dict:
        return self.posterior.summary()


class TSEpisodic(LearningPolicy):
    """
    One posterior sample per episode; the LP for the whole season is solved
    up front and followed for all periods.
    """
    kind = "ts-episodic"

    def _begin_episode(self, n0, rng):
        self.episode_sample = self.posterior.sample_posterior(rng)
        self.current_plan = self._solve_lp(self.episode_sample, start=1, inventory=n0)

    def action_row(self, t, inventory, rng):
        return self.current_plan.row(t)


class TSDynamic(LearningPolicy):
    """
    Fresh posterior sample and LP for the remaining periods and inventory in
    every period.
    """
    kind = "ts-dynamic"

    def action_row(self, t, inventory, rng):
        sample = self.posterior.sample_posterior(rng)
        self.current_plan = self._solve_lp(sample, start=t, inventory=inventory)
        return self.current_plan.x[0]


class TSFixedStar(LearningPolicy):
    """
    One posterior sample per episode; every period spends the initial
    inventory spread evenly over the whole horizon.
    """
    kind = "ts-fixed-star"

    def _begin_episode(self, n0, rng):
        self.episode_sample = self.posterior.sample_posterior(rng)

    def action_row(self, t, inventory, rng):
        return self._solve_lp_avg(self.episode_sample[t - 1], inventory=self.n0, tau=self.horizon)


class TSUpdateStar(LearningPolicy):
    """
    One posterior sample per episode; every period spends the current
    inventory spread evenly over the remaining periods.
    """
    kind = "ts-update-star"

    def _begin_episode(self, n0, rng):
        self.episode_sample = self.posterior.sample_posterior(rng)

    def action_row(self, t, inventory, rng):
        return self._solve_lp_avg(
            self.episode_sample[t - 1], inventory=inventory, tau=self.horizon - t + 1,
        )
