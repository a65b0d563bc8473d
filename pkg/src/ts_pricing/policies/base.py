from typing import Optional
import logging

import numpy as np

from ts_pricing.demand import PriceGrid
from ts_pricing.lp import PricingPlan, solve_lp, solve_lp_avg

logger = logging.getLogger(__name__)


def sample_action(row: np.ndarray, rng: np.random.Generator) -> int:
    """
    Sample a price index from the mixing probabilities `row` with a single
    uniform draw; the residual probability `1 - sum(row)` maps to the
    shut-off index `len(row)`.

    Examples
    --------

    >>> rng = np.random.default_rng(0)
    >>> sample_action(np.array([0.0, 0.0]), rng)
    2
    >>> sample_action(np.array([0.0, 1.0]), rng)
    1
    """
    u = rng.random()
    cumulative = np.cumsum(row)
    return int(np.searchsorted(cumulative, u, side='right'))


class Policy:
    """
    Common contract of all pricing policies. One instance is driven by a
    single simulation: :meth:`begin_episode` once per episode, then
    :meth:`choose_price` and :meth:`observe` once per period.

    Randomness comes only from the `rng` arguments, so a policy run is fully
    determined by its rng stream.
    """
    kind: str = ""
    is_learning: bool = False

    def __init__(self, grid: PriceGrid, horizon: int):
        if horizon < 1:
            raise ValueError(f"horizon must be positive, got {horizon}")
        self.grid = grid
        self.horizon = horizon
        self.n0: Optional[int] = None
        self.current_plan: Optional[PricingPlan] = None
        self.episode_sample: Optional[np.ndarray] = None
        # number of LP solutions requested by the policy, cached or not
        self.lp_calls = 0

    @property
    def shutoff(self) -> int:
        return self.grid.shutoff

    def begin_episode(self, n0: int, rng: np.random.Generator) -> "Policy":
        if n0 < 0:
            raise ValueError(f"n0 must be non-negative, got {n0}")
        self.n0 = n0
        self._begin_episode(n0, rng)
        return self

    def _begin_episode(self, n0: int, rng: np.random.Generator):
        pass

    def action_row(self, t: int, inventory: int, rng: np.random.Generator) -> np.ndarray:
        """
        Mixing probabilities over the `K` real prices for period `t`; may
        consume random draws (for example a fresh posterior sample).
        """
        raise NotImplementedError()

    def choose_price(self, t: int, inventory: int, rng: np.random.Generator) -> int:
        if self.n0 is None:
            raise RuntimeError("begin_episode must be called before choose_price")
        if not (1 <= t <= self.horizon):
            raise ValueError(f"period {t} out of range [1, {self.horizon}]")
        if inventory < 0:
            raise ValueError(f"inventory must be non-negative, got {inventory}")
        row = self.action_row(t, inventory, rng)
        return sample_action(row, rng)

    def observe(self, t: int, k: int, demand: int) -> "Policy":
        return self

    def summary(self) -> Optional[dict]:
        return None

    # LP helpers counting the requests:

    def _solve_lp(self, lam: np.ndarray, start: int, inventory: float) -> PricingPlan:
        self.lp_calls += 1
        return solve_lp(lam, start=start, inventory=inventory, prices=self.grid)

    def _solve_lp_avg(self, lam_row: np.ndarray, inventory: float, tau: int) -> np.ndarray:
        self.lp_calls += 1
        return solve_lp_avg(lam_row, inventory=inventory, tau=tau, prices=self.grid).x

    def __repr__(self):
        return f"<{self.__class__.__name__} kind={self.kind} lp_calls={self.lp_calls}>"
