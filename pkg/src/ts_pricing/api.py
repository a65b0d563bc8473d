from typing import Optional, Union
from collections.abc import Sequence

import numpy as np
from opentelemetry import trace

from .demand import DemandEnvironment, PriceGrid, load_environment
from .dp import ValueTable, solve_dp, oracle_policy_action
from .harness.config import ExperimentConfig, expand_preset, config_from_dict
from .harness.executor import TrialExecutor, TrialTask, make_executor
from .harness.runner import ExperimentResult, run_experiment
from .hooks import Hooks
from .lp import PricingPlan, check_certificate, solve_lp, solve_lp_avg
from .posterior import PosteriorState, make_posterior
from .regret import RegretCurve, relative_regret_curve
from .sim import TrialResult, derive_seed, run_trial

tracer = trace.get_tracer(__name__)

__all__ = [
    "PricingContext", "DemandEnvironment", "PriceGrid", "load_environment",
    "ValueTable", "solve_dp", "oracle_policy_action", "ExperimentConfig",
    "expand_preset", "ExperimentResult", "run_experiment", "Hooks", "PricingPlan",
    "check_certificate", "solve_lp", "solve_lp_avg", "PosteriorState",
    "make_posterior", "RegretCurve", "relative_regret_curve", "TrialResult",
    "run_trial",
]


class PricingContext:
    '''
    :class:`PricingContext` holds the computational resources for running
    pricing experiments, in particular the trial executor. It is the entry
    point to most interactions with the ts-pricing API.

    If no executor is passed in, a process pool sized by
    :func:`~ts_pricing.harness.executor.default_workers` is started on first
    use; pass `workers=1` to run everything in the current process.

    Examples
    --------

    >>> with PricingContext(workers=1) as ctx:
    ...     env = ctx.make_environment('formula-A1', prices=range(1, 10), horizon=10)
    ...     round(ctx.rev_star(env, n0=50), 1)
    330.1
    '''
    def __init__(
        self,
        executor: Optional[TrialExecutor] = None,
        workers: Optional[int] = None,
        hooks: Optional[Hooks] = None,
    ):
        self._executor = executor
        self._own_executor = executor is None
        self._workers = workers
        if hooks is None:
            hooks = Hooks()
        self.hooks = hooks

    @property
    def executor(self) -> TrialExecutor:
        if self._executor is None:
            self._executor = make_executor(self._workers)
        return self._executor

    def make_environment(
        self,
        kind: str,
        prices: Sequence[float],
        horizon: int,
        r: Optional[float] = None,
    ) -> DemandEnvironment:
        return DemandEnvironment.from_formula(kind, prices=prices, horizon=horizon, r=r)

    def make_posterior(self, family: str, env: DemandEnvironment, **hyperparams) -> PosteriorState:
        return make_posterior(family, grid=env.grid, horizon=env.horizon, **hyperparams)

    def solve_dp(self, env: DemandEnvironment, n0: int) -> ValueTable:
        return solve_dp(env, n0)

    def rev_star(self, env: DemandEnvironment, n0: int) -> float:
        return solve_dp(env, n0).rev_star

    def run_trial(
        self,
        env: DemandEnvironment,
        policy: str,
        prior: Union[None, dict, PosteriorState],
        n0: int,
        episodes: int,
        seed: int,
        trial_index: int = 0,
        record_traces: bool = False,
    ) -> TrialResult:
        """
        Run a single trial in the current process, calling the context's
        hooks.
        """
        return run_trial(
            env, policy, prior, n0=n0, episodes=episodes, seed=seed,
            trial_index=trial_index, hooks=self.hooks, record_traces=record_traces,
        )

    def run_trials(
        self,
        env: DemandEnvironment,
        policy: str,
        prior: dict,
        n0: int,
        episodes: int,
        trials: int,
        base_seed: int = 0,
    ) -> list[TrialResult]:
        """
        Run independent trials on the context's executor, ordered by trial
        index.
        """
        tasks = [
            TrialTask(
                trial_index=i,
                policy=policy,
                seed=derive_seed(base_seed, i),
                environment=env.to_dict(),
                prior=prior,
                n0=n0,
                episodes=episodes,
            )
            for i in range(trials)
        ]
        with tracer.start_as_current_span("PricingContext.run_trials"):
            results = list(self.executor.map(tasks))
        return sorted(results, key=lambda r: r.trial_index)

    def regret_curve(self, trials: Sequence[TrialResult], rev_star: float) -> RegretCurve:
        return relative_regret_curve(trials, rev_star)

    def run_experiment(
        self,
        config: Union[str, dict, ExperimentConfig],
        progress: bool = False,
        bayesian: bool = False,
    ) -> ExperimentResult:
        """
        Run an experiment given as a preset name, a configuration document or
        an :class:`~ts_pricing.harness.config.ExperimentConfig`.
        """
        if isinstance(config, str):
            config = expand_preset(config)
        elif isinstance(config, dict):
            config = config_from_dict(config)
        return run_experiment(config, executor=self.executor, progress=progress, bayesian=bayesian)

    def plan(self, lam: np.ndarray, start: int, inventory: float, grid: PriceGrid) -> PricingPlan:
        return solve_lp(lam, start=start, inventory=inventory, prices=grid)

    def close(self):
        if self._own_executor and self._executor is not None:
            self._executor.close()
            self._executor = None

    def __enter__(self):
        return self

    def __exit__(self, *args, **kwargs):
        self.close()
