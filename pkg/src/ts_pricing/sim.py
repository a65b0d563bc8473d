"""
The episodic selling process: `S` seasons of `T` periods, each starting
with fresh inventory `n0`, driven by one pricing policy.
"""
from typing import NamedTuple, Optional, Union
import logging

import numpy as np
from opentelemetry import trace

from ts_pricing.demand import DemandEnvironment, PriceGrid
from ts_pricing.hooks import Hooks, EpisodeDoneEnv, TrialDoneEnv
from ts_pricing.policies import Policy, make_policy, LEARNING_KINDS
from ts_pricing.posterior import PosteriorState, posterior_from_dict

logger = logging.getLogger(__name__)
tracer = trace.get_tracer(__name__)


class EpisodeTrace(NamedTuple):
    """
    Per-period records of one episode; all arrays have length `T`.
    `inventory` holds the inventory after each period.
    """
    actions: np.ndarray
    prices: np.ndarray
    demands: np.ndarray
    satisfied: np.ndarray
    revenues: np.ndarray
    inventory: np.ndarray

    @property
    def revenue(self) -> float:
        return float(self.revenues.sum())

    @property
    def lost_sales(self) -> int:
        return int((self.demands - self.satisfied).sum())

    @property
    def units_sold(self) -> int:
        return int(self.satisfied.sum())


class TrialResult(NamedTuple):
    trial_index: int
    seed: int
    policy: str
    revenues: np.ndarray
    lost_sales: np.ndarray
    posterior_summary: Optional[dict]
    traces: Optional[list[EpisodeTrace]] = None

    @property
    def episodes(self) -> int:
        return self.revenues.shape[0]


def derive_seed(base_seed: int, trial_index: int) -> int:
    """
    Seed of trial `trial_index`, independent of which worker runs it.

    Examples
    --------

    >>> derive_seed(7, 0) == derive_seed(7, 0)
    True
    >>> derive_seed(7, 0) != derive_seed(7, 1)
    True
    """
    if base_seed < 0 or trial_index < 0:
        raise ValueError(
            f"seeds must be non-negative, got base_seed={base_seed}, trial_index={trial_index}"
        )
    seq = np.random.SeedSequence([base_seed, trial_index])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def apply_sale(inventory: int, price: float, demand: int) -> tuple[int, float, int]:
    """
    Ledger update for one period: returns `(satisfied, revenue, inventory_after)`.

    Examples
    --------

    >>> apply_sale(inventory=3, price=4.0, demand=5)
    (3, 12.0, 0)
    """
    satisfied = min(demand, inventory)
    return satisfied, price * satisfied, max(inventory - demand, 0)


def replay(grid: PriceGrid, actions, demands, n0: int) -> EpisodeTrace:
    """
    Recompute an episode's ledger from its actions and raw demands.
    """
    actions = np.asarray(actions, dtype=np.int64)
    demands = np.asarray(demands, dtype=np.int64)
    horizon = actions.shape[0]
    prices = np.zeros(horizon)
    satisfied = np.zeros(horizon, dtype=np.int64)
    revenues = np.zeros(horizon)
    inventory = np.zeros(horizon, dtype=np.int64)
    inv = n0
    for i in range(horizon):
        prices[i] = grid.price_of(int(actions[i]))
        satisfied[i], revenues[i], inv = apply_sale(inv, prices[i], int(demands[i]))
        inventory[i] = inv
    return EpisodeTrace(
        actions=actions, prices=prices, demands=demands,
        satisfied=satisfied, revenues=revenues, inventory=inventory,
    )


def run_episode(
    env: DemandEnvironment,
    policy: Policy,
    n0: int,
    rng: np.random.Generator,
) -> tuple[EpisodeTrace, Policy]:
    """
    Run one selling season. In every period the policy draws first, then the
    demand is drawn (also when the inventory is exhausted, so the policy
    keeps learning); shut-off periods draw no demand.
    """
    if n0 < 0:
        raise ValueError(f"n0 must be non-negative, got {n0}")
    horizon = env.horizon
    grid = env.grid
    actions = np.zeros(horizon, dtype=np.int64)
    prices = np.zeros(horizon)
    demands = np.zeros(horizon, dtype=np.int64)
    satisfied = np.zeros(horizon, dtype=np.int64)
    revenues = np.zeros(horizon)
    inventory = np.zeros(horizon, dtype=np.int64)

    policy.begin_episode(n0, rng)
    inv = n0
    for t in range(1, horizon + 1):
        action = policy.choose_price(t, inv, rng)
        demand = env.sample_demand(t, action, rng)
        price = grid.price_of(action)
        sold, revenue, inv = apply_sale(inv, price, demand)
        policy.observe(t, action, demand)
        i = t - 1
        actions[i] = action
        prices[i] = price
        demands[i] = demand
        satisfied[i] = sold
        revenues[i] = revenue
        inventory[i] = inv
    episode = EpisodeTrace(
        actions=actions, prices=prices, demands=demands,
        satisfied=satisfied, revenues=revenues, inventory=inventory,
    )
    return episode, policy


def build_policy(
    env: DemandEnvironment,
    policy_kind: str,
    prior: Union[None, dict, PosteriorState],
) -> Policy:
    """
    Create a fresh policy for `env`; learning policies get an empty
    posterior built from `prior`.
    """
    if policy_kind in LEARNING_KINDS:
        if prior is None:
            raise ValueError(f"policy {policy_kind} needs a prior")
        if isinstance(prior, PosteriorState):
            posterior = prior.clone()
        else:
            posterior = posterior_from_dict(prior, env.grid, env.horizon, r=env.r)
        return make_policy(
            policy_kind, grid=env.grid, horizon=env.horizon, posterior=posterior,
        )
    return make_policy(
        policy_kind, grid=env.grid, horizon=env.horizon, true_means=env.mean_demand(),
    )


def run_trial(
    env: DemandEnvironment,
    policy_kind: str,
    prior: Union[None, dict, PosteriorState],
    n0: int,
    episodes: int,
    seed: int,
    trial_index: int = 0,
    hooks: Optional[Hooks] = None,
    record_traces: bool = False,
) -> TrialResult:
    """
    Run `episodes` consecutive seasons with one evolving policy, using a
    single rng stream seeded with `seed`.
    """
    if episodes < 1:
        raise ValueError(f"need at least one episode, got {episodes}")
    if hooks is None:
        hooks = Hooks()
    rng = np.random.default_rng(seed)
    policy = build_policy(env, policy_kind, prior)
    revenues = np.zeros(episodes)
    lost_sales = np.zeros(episodes, dtype=np.int64)
    traces: Optional[list[EpisodeTrace]] = [] if record_traces else None
    with tracer.start_as_current_span("run_trial") as span:
        span.set_attributes({
            "ts_pricing.trial_index": trial_index,
            "ts_pricing.policy": policy_kind,
            "ts_pricing.episodes": episodes,
        })
        for s in range(episodes):
            episode, policy = run_episode(env, policy, n0, rng)
            revenues[s] = episode.revenue
            lost_sales[s] = episode.lost_sales
            if traces is not None:
                traces.append(episode)
            hooks.on_episode_done(EpisodeDoneEnv(
                trial_index=trial_index, episode=s + 1, policy=policy_kind, trace=episode,
            ))
        span.set_attribute("ts_pricing.lp_calls", policy.lp_calls)
    result = TrialResult(
        trial_index=trial_index,
        seed=seed,
        policy=policy_kind,
        revenues=revenues,
        lost_sales=lost_sales,
        posterior_summary=policy.summary(),
        traces=traces,
    )
    hooks.on_trial_done(TrialDoneEnv(result=result))
    logger.debug(
        "trial %d (%s) done: mean episode revenue %.4f",
        trial_index, policy_kind, revenues.mean(),
    )
    return result
