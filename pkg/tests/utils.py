import itertools
import logging

import numpy as np

from ts_pricing.demand import DemandEnvironment, PriceGrid, compensated_tails
from ts_pricing.posterior import SufficientStats

logger = logging.getLogger(__name__)

PRICES_1_TO_9 = list(range(1, 10))


def preset_env(kind='formula-A1', horizon=10, r=None) -> DemandEnvironment:
    return DemandEnvironment.from_formula(kind, prices=PRICES_1_TO_9, horizon=horizon, r=r)


def random_lp_instance(rng: np.random.Generator, max_t=12, max_k=10):
    """
    Random LP instance: `T <= max_t`, `K <= max_k`, `lambda` in `(0, 60)`,
    inventory in `[0, 2 * sum(lambda)]` and a random start period.
    """
    horizon = int(rng.integers(1, max_t + 1))
    num_prices = int(rng.integers(1, max_k + 1))
    lam = rng.uniform(0, 60, size=(horizon, num_prices))
    lam[lam == 0] = 1e-3
    prices = np.sort(rng.choice(np.arange(1, 4 * max_k + 1), size=num_prices, replace=False))
    start = int(rng.integers(1, horizon + 1))
    inventory = float(rng.uniform(0, 2 * lam[start - 1:].sum()))
    return lam, start, inventory, prices.astype(np.float64)


def random_small_env(rng: np.random.Generator, max_t=6, max_k=4) -> DemandEnvironment:
    horizon = int(rng.integers(1, max_t + 1))
    num_prices = int(rng.integers(1, max_k + 1))
    prices = np.sort(rng.choice(np.arange(1, 11), size=num_prices, replace=False))
    if rng.random() < 0.5:
        params = rng.uniform(0.1, 8, size=(horizon, num_prices))
        return DemandEnvironment('poisson', PriceGrid(prices), params)
    params = rng.uniform(0.3, 0.95, size=(horizon, num_prices))
    return DemandEnvironment('negbin', PriceGrid(prices), params, r=float(rng.integers(1, 6)))


def feed_observations(posterior, env: DemandEnvironment, count: int, rng: np.random.Generator):
    """
    Add `count` observations of every cell, drawn from `env`, directly to
    the sufficient statistics of `posterior`.
    """
    horizon, num_prices = env.params.shape
    if env.family == 'poisson':
        draws = rng.poisson(env.params[..., np.newaxis], size=(horizon, num_prices, count))
    else:
        draws = rng.negative_binomial(
            env.r, env.params[..., np.newaxis], size=(horizon, num_prices, count),
        )
    sums = draws.sum(axis=-1).astype(np.int64)
    posterior.stats = SufficientStats(
        horizon, num_prices,
        counts=np.full((horizon, num_prices), count), sums=sums,
    )
    posterior._invalidate()
    return posterior


def truncated_pmf_tables(pmf_rows: np.ndarray, cap: int):
    """
    Turn explicit demand distributions `pmf_rows[t, k, :]` (support
    `0 .. len - 1`) into the `(pmf, tails)` tables used by the dynamic
    program, for inventory up to `cap`.
    """
    horizon, num_prices, support = pmf_rows.shape
    padded = np.zeros((horizon, num_prices, max(cap + 1, support)))
    padded[..., :support] = pmf_rows
    return padded[..., :cap + 1], compensated_tails(padded)[..., :cap + 1]


def policy_value(pmf_rows, prices, policy: dict, horizon: int, n0: int) -> float:
    """
    Expected revenue of a deterministic policy `{(t, n): action}` under
    explicit demand distributions, by exact forward recursion.
    """
    num_prices = len(prices)

    def value(t, n):
        if t > horizon:
            return 0.0
        action = policy[(t, n)]
        if action == num_prices:
            return value(t + 1, n)
        total = 0.0
        for d, prob in enumerate(pmf_rows[t - 1, action]):
            if prob == 0:
                continue
            sold = min(d, n)
            total += prob * (prices[action] * sold + value(t + 1, n - sold))
        return total

    return value(1, n0)


def reachable_states(pmf_rows, horizon: int, n0: int):
    """
    States `(t, n)` that can be reached from `(1, n0)` under some policy.
    """
    support = pmf_rows.shape[2]
    states = [(1, n0)]
    levels = {n0}
    for t in range(2, horizon + 1):
        levels = {max(n - d, 0) for n in levels for d in range(support)}
        states.extend((t, n) for n in sorted(levels))
    return states


def enumerate_policies(states, num_actions):
    for actions in itertools.product(range(num_actions), repeat=len(states)):
        yield dict(zip(states, actions))
