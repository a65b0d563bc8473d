from typing import NamedTuple, Optional
import logging
import os

from opentelemetry import trace
from tqdm import tqdm

from ts_pricing.dp import solve_dp
from ts_pricing.policies import LEARNING_KINDS, ORACLE_KINDS
from ts_pricing.provenance import describe
from ts_pricing.regret import (
    RegretCurve, relative_regret_curve, absolute_regret, oracle_regret_summary,
    estimate_bayesian_regret,
)
from ts_pricing.sim import TrialResult, derive_seed
from .config import ExperimentConfig, build_environment, build_prior, config_to_dict
from .executor import TrialTask, TrialExecutor, make_executor
from .output import ensure_dir, write_regret_csv, write_summary_json, write_trace_csv

logger = logging.getLogger(__name__)
tracer = trace.get_tracer(__name__)

REGRET_CSV = "regret.csv"
SUMMARY_JSON = "summary.json"
TRACES_CSV = "traces.csv"


class ExperimentResult(NamedTuple):
    config: ExperimentConfig
    rev_star: float
    trials: dict[str, list[TrialResult]]
    curves: dict[str, RegretCurve]
    summary: dict
    files: list[str]


def make_tasks(config: ExperimentConfig) -> list[TrialTask]:
    """
    One task per (policy, trial). All policies of a trial share the trial's
    seed.
    """
    tasks = []
    for policy in config.policies:
        for trial_index in range(config.trials):
            tasks.append(TrialTask(
                trial_index=trial_index,
                policy=policy,
                seed=derive_seed(config.base_seed, trial_index),
                environment=config.environment,
                prior=config.prior,
                n0=config.n0,
                episodes=config.episodes,
                record_traces=config.traces,
            ))
    return tasks


def summarize(
    config: ExperimentConfig,
    rev_star: float,
    trials: dict[str, list[TrialResult]],
    curves: dict[str, RegretCurve],
) -> dict:
    policies = {}
    for policy, results in trials.items():
        mean, stderr = curves[policy].final
        absolute = absolute_regret(results, rev_star)
        entry = {
            "final_relative_regret": {"mean": mean, "stderr": stderr},
            "absolute_regret": {"mean": absolute.mean, "half_width": absolute.half_width},
            "mean_lost_sales": float(
                sum(float(r.lost_sales.mean()) for r in results) / len(results)
            ),
        }
        if policy in ORACLE_KINDS:
            entry["oracle"] = oracle_regret_summary(results, rev_star).to_dict()
        policies[policy] = entry
    return {
        "config": config_to_dict(config),
        "rev_star": rev_star,
        "policies": policies,
        "provenance": describe(),
    }


def run_experiment(
    config: ExperimentConfig,
    executor: Optional[TrialExecutor] = None,
    progress: bool = False,
    bayesian: bool = False,
) -> ExperimentResult:
    """
    Run all trials of `config`, compute the regret curves against the
    dynamic-program optimum and, if `config.output` is set, write
    :code:`regret.csv`, :code:`summary.json` and (with `config.traces`)
    :code:`traces.csv` into that directory.
    """
    env = build_environment(config)
    prior = build_prior(config)
    own_executor = executor is None
    if executor is None:
        executor = make_executor(config.workers)
    with tracer.start_as_current_span("run_experiment") as span:
        span.set_attributes({
            "ts_pricing.experiment": config.name,
            "ts_pricing.trials": config.trials,
            "ts_pricing.episodes": config.episodes,
            "ts_pricing.policies": list(config.policies),
        })
        logger.info(
            "running experiment %s: %d trials x %d episodes of %s",
            config.name, config.trials, config.episodes, ", ".join(config.policies),
        )
        rev_star = solve_dp(env, config.n0).rev_star
        tasks = make_tasks(config)
        collected: dict[str, list[TrialResult]] = {p: [] for p in config.policies}
        try:
            for result in tqdm(
                executor.map(tasks), total=len(tasks), disable=not progress, desc=config.name,
            ):
                collected[result.policy].append(result)
        finally:
            if own_executor:
                executor.close()
        trials = {
            p: sorted(results, key=lambda r: r.trial_index)
            for p, results in collected.items()
        }
        curves = {p: relative_regret_curve(results, rev_star) for p, results in trials.items()}
        summary = summarize(config, rev_star, trials, curves)
        if bayesian:
            summary["bayesian_regret"] = {}
            for policy in config.policies:
                if policy not in LEARNING_KINDS:
                    continue
                est = estimate_bayesian_regret(
                    prior, env.grid, policy, n0=config.n0, episodes=config.episodes,
                    num_samples=config.trials, base_seed=config.base_seed,
                )
                summary["bayesian_regret"][policy] = {
                    "mean": est.mean, "half_width": est.half_width,
                }

    files = []
    if config.output is not None:
        ensure_dir(config.output)
        regret_path = os.path.join(config.output, REGRET_CSV)
        write_regret_csv(regret_path, trials, rev_star)
        files.append(regret_path)
        if config.traces:
            traces_path = os.path.join(config.output, TRACES_CSV)
            write_trace_csv(traces_path, trials, env.grid)
            files.append(traces_path)
        summary_path = os.path.join(config.output, SUMMARY_JSON)
        write_summary_json(summary_path, summary)
        files.append(summary_path)
    logger.info("experiment %s done, rev*=%.4f", config.name, rev_star)
    return ExperimentResult(
        config=config,
        rev_star=rev_star,
        trials=trials,
        curves=curves,
        summary=summary,
        files=files,
    )
