"""
Regret of simulated trials against the optimal expected revenue `rev*` of
the known-demand dynamic program.
"""
from typing import NamedTuple, Optional, Union
from collections.abc import Sequence
import logging

import numpy as np

from ts_pricing.demand import PriceGrid
from ts_pricing.dp import solve_dp
from ts_pricing.posterior import PosteriorState
from ts_pricing.sim import TrialResult, derive_seed, run_trial

logger = logging.getLogger(__name__)

# two-sided 95% normal quantile for confidence half-widths
Z_95 = 1.96

RevenuesLike = Union[Sequence[TrialResult], np.ndarray]


def _revenue_matrix(trials: RevenuesLike) -> np.ndarray:
    if isinstance(trials, np.ndarray):
        revenues = np.atleast_2d(np.asarray(trials, dtype=np.float64))
    else:
        if len(trials) == 0:
            raise ValueError("need at least one trial")
        lengths = {t.revenues.shape[0] for t in trials}
        if len(lengths) != 1:
            raise ValueError(f"all trials must have the same number of episodes, got {lengths}")
        revenues = np.stack([t.revenues for t in trials])
    if revenues.shape[0] == 0 or revenues.shape[1] == 0:
        raise ValueError(f"need at least one trial and one episode, got {revenues.shape}")
    return revenues


def _check_rev_star(rev_star: float):
    if not rev_star > 0:
        raise ValueError(f"rev_star must be positive, got {rev_star}")


def _stderr(values: np.ndarray, axis: int = 0) -> np.ndarray:
    n = values.shape[axis]
    if n < 2:
        return np.zeros(np.delete(values.shape, axis))
    return values.std(axis=axis, ddof=1) / np.sqrt(n)


def relative_regret(revenues: np.ndarray, rev_star: float) -> np.ndarray:
    '''
    Cumulative relative regret `1 - sum(revenues[:s]) / (s * rev_star)` for
    every episode count `s`, along the last axis.

    Examples
    --------

    >>> relative_regret(np.array([10.0, 0.0]), rev_star=10.0).tolist()
    [0.0, 0.5]
    '''
    _check_rev_star(rev_star)
    revenues = np.asarray(revenues, dtype=np.float64)
    s = np.arange(1, revenues.shape[-1] + 1)
    return 1 - np.cumsum(revenues, axis=-1) / (s * rev_star)


class RegretCurve(NamedTuple):
    rev_star: float
    mean: np.ndarray
    stderr: np.ndarray
    per_trial: np.ndarray

    @property
    def episodes(self) -> int:
        return self.mean.shape[0]

    @property
    def final(self) -> tuple[float, float]:
        return float(self.mean[-1]), float(self.stderr[-1])


def relative_regret_curve(trials: RevenuesLike, rev_star: float) -> RegretCurve:
    """
    Mean and standard error across trials of the cumulative relative regret
    after each episode.
    """
    _check_rev_star(rev_star)
    revenues = _revenue_matrix(trials)
    per_trial = relative_regret(revenues, rev_star)
    return RegretCurve(
        rev_star=float(rev_star),
        mean=per_trial.mean(axis=0),
        stderr=_stderr(per_trial),
        per_trial=per_trial,
    )


class MonteCarloEstimate(NamedTuple):
    mean: float
    half_width: float
    samples: np.ndarray


def absolute_regret(
    trials: RevenuesLike, rev_star: float, episodes: Optional[int] = None,
) -> MonteCarloEstimate:
    """
    Monte-Carlo estimate of `S * rev* - sum of episode revenues` over the
    first `episodes` episodes (default: all), with a 95% half-width.
    """
    revenues = _revenue_matrix(trials)
    if episodes is None:
        episodes = revenues.shape[1]
    if not (1 <= episodes <= revenues.shape[1]):
        raise ValueError(f"episodes must be in [1, {revenues.shape[1]}], got {episodes}")
    samples = episodes * rev_star - revenues[:, :episodes].sum(axis=1)
    return MonteCarloEstimate(
        mean=float(samples.mean()),
        half_width=float(Z_95 * _stderr(samples)),
        samples=samples,
    )


class OracleRegretSummary(NamedTuple):
    """
    Relative regret `1 - revenue / rev*` of single episodes, summarized over
    all episodes of all trials.
    """
    mean: float
    spread: float
    stderr: float
    num_samples: int

    def to_dict(self) -> dict:
        return self._asdict()


def oracle_regret_summary(trials: RevenuesLike, rev_star: float) -> OracleRegretSummary:
    """
    Summary for policies that do not learn: their episodes are independent
    and identically distributed, so every episode is one sample.
    """
    _check_rev_star(rev_star)
    samples = (1 - _revenue_matrix(trials) / rev_star).ravel()
    spread = float(samples.std(ddof=1)) if samples.shape[0] > 1 else 0.0
    return OracleRegretSummary(
        mean=float(samples.mean()),
        spread=spread,
        stderr=spread / np.sqrt(samples.shape[0]),
        num_samples=int(samples.shape[0]),
    )


def block_regret(trials: RevenuesLike, rev_star: float, first: int, last: int) -> float:
    """
    Mean per-episode relative regret `1 - revenue / rev*` over the episodes
    `first .. last` (1-based, inclusive), averaged over trials.
    """
    _check_rev_star(rev_star)
    revenues = _revenue_matrix(trials)
    if not (1 <= first <= last <= revenues.shape[1]):
        raise ValueError(
            f"invalid episode block [{first}, {last}] for {revenues.shape[1]} episodes"
        )
    return float(np.mean(1 - revenues[:, first - 1:last] / rev_star))


def estimate_bayesian_regret(
    prior: PosteriorState,
    grid: PriceGrid,
    policy_kind: str,
    n0: int,
    episodes: int,
    num_samples: int,
    base_seed: int,
) -> MonteCarloEstimate:
    """
    Expected regret over the prior: draw a true demand law from `prior`,
    compute its `rev*` with the dynamic program and run one trial of the
    policy (which starts from the same prior) against it.
    """
    if num_samples < 1:
        raise ValueError(f"need at least one sample, got {num_samples}")
    samples = np.zeros(num_samples)
    for i in range(num_samples):
        seed = derive_seed(base_seed, i)
        env_rng = np.random.default_rng([seed, 1])
        env = prior.sample_environment(grid, env_rng)
        rev_star = solve_dp(env, n0).rev_star
        result = run_trial(
            env, policy_kind, prior, n0=n0, episodes=episodes, seed=seed, trial_index=i,
        )
        samples[i] = episodes * rev_star - result.revenues.sum()
    logger.info(
        "bayesian regret of %s over %d prior draws: %.4f",
        policy_kind, num_samples, samples.mean(),
    )
    return MonteCarloEstimate(
        mean=float(samples.mean()),
        half_width=float(Z_95 * _stderr(samples)),
        samples=samples,
    )
