"""
Benchmark policies that know the true mean demand and never learn.
"""
import logging

import numpy as np

from ts_pricing.demand import PriceGrid
from ts_pricing.lp import PricingPlan
from .base import Policy

logger = logging.getLogger(__name__)


class OraclePolicy(Policy):
    def __init__(self, grid: PriceGrid, horizon: int, true_means: np.ndarray):
        super().__init__(grid, horizon)
        true_means = np.array(true_means, dtype=np.float64)
        if true_means.shape != (horizon, grid.num_prices):
            raise ValueError(
                f"true means must have shape ({horizon}, {grid.num_prices}), "
                f"got {true_means.shape}"
            )
        true_means.setflags(write=False)
        self.true_means = true_means
        self._plans: dict[tuple[int, int], PricingPlan] = {}
        # number of LPs actually solved, as opposed to `lp_calls`
        self.lp_solves = 0

    def _plan(self, start: int, inventory: int) -> PricingPlan:
        key = (start, inventory)
        plan = self._plans.get(key)
        if plan is None:
            self.lp_solves += 1
            plan = self._solve_lp(self.true_means, start=start, inventory=inventory)
            self._plans[key] = plan
        else:
            self.lp_calls += 1
        return plan


class TSEpisodicStar(OraclePolicy):
    """
    Solves the season LP with the true means once and follows it.
    """
    kind = "ts-episodic-star"

    def _begin_episode(self, n0, rng):
        self.episode_sample = self.true_means
        self.current_plan = self._plan(1, n0)

    def action_row(self, t, inventory, rng):
        return self.current_plan.row(t)


class TSDynamicStar(OraclePolicy):
    """
    Re-solves the LP with the true means for the remaining periods and the
    current inventory in every period.
    """
    kind = "ts-dynamic-star"

    def action_row(self, t, inventory, rng):
        self.current_plan = self._plan(t, inventory)
        return self.current_plan.x[0]
