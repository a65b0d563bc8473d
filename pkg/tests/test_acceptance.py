"""
Long-running checks of the reference numbers: oracle regret tables, the
ordering of the learning curves and the decay of per-episode regret.
"""
import numpy as np
import pytest

from ts_pricing.demand import DemandEnvironment, PriceGrid
from ts_pricing.dp import solve_dp
from ts_pricing.harness.config import expand_preset
from ts_pricing.harness.executor import make_executor
from ts_pricing.harness.runner import run_experiment
from ts_pricing.regret import block_regret, oracle_regret_summary
from ts_pricing.sim import derive_seed, run_trial

from utils import preset_env

# oracle episodes are i.i.d., so a few long trials are pooled into one sample
ORACLE_SEEDS = 5
ORACLE_EPISODES = 10_000

TOP_PRICE_TIE = pytest.mark.xfail(
    strict=True,
    reason="re-solving LP rations the top price once inventory falls below "
           "the remaining demand at that price, see DESIGN.md",
)


def pooled_oracle_regret(kind, n0, policy, seeds=ORACLE_SEEDS, episodes=ORACLE_EPISODES):
    env = preset_env(kind)
    rev_star = solve_dp(env, n0).rev_star
    results = [
        run_trial(env, policy, None, n0=n0, episodes=episodes, seed=derive_seed(s, 0))
        for s in range(seeds)
    ]
    return oracle_regret_summary(results, rev_star)


# the reference tables report the per-episode spread next to each mean;
# their own mean is uncertain by spread / sqrt(reference trials)
def agreement_tolerance(spread, reference_trials, num_samples, floor):
    both = np.sqrt(1 / reference_trials + 1 / num_samples)
    return max(floor, 4 * spread * both)


@pytest.mark.slow
@pytest.mark.with_numba
@pytest.mark.parametrize(
    'kind,n0,policy,expected,spread,reference_trials,floor', [
        ('formula-A1', 50, 'ts-episodic-star', 0.0263, 0.0859, 10_000, 0.003),
        ('formula-A1', 50, 'ts-dynamic-star', 0.0127, 0.0878, 10_000, 0.003),
        ('formula-A1', 1000, 'ts-episodic-star', 0.0007, 0.1183, 10_000, 0.004),
        ('formula-A1', 1000, 'ts-dynamic-star', -0.0009, 0.1180, 10_000, 0.004),
        ('formula-B', 50, 'ts-episodic-star', 0.0173, 0.0815, 200_000, 0.003),
        ('formula-B', 50, 'ts-dynamic-star', 0.0239, 0.0690, 200_000, 0.003),
        ('formula-B', 1000, 'ts-episodic-star', 0.0002, 0.0837, 200_000, 0.004),
        ('formula-B', 1000, 'ts-dynamic-star', 0.0003, 0.0836, 200_000, 0.004),
        ('negbin-PA', 30, 'ts-episodic-star', 0.0472, 0.1268, 10_000, 0.003),
        pytest.param(
            'negbin-PA', 30, 'ts-dynamic-star', -0.0014, 0.0860, 10_000, 0.003,
            marks=TOP_PRICE_TIE,
        ),
        ('negbin-PA', 1000, 'ts-episodic-star', -0.0011, 0.1763, 10_000, 0.004),
        ('negbin-PA', 1000, 'ts-dynamic-star', 0.0028, 0.1774, 10_000, 0.004),
        ('negbin-PB', 30, 'ts-episodic-star', 0.0392, 0.1212, 10_000, 0.003),
        ('negbin-PB', 30, 'ts-dynamic-star', 0.0124, 0.1148, 10_000, 0.003),
        ('negbin-PB', 1000, 'ts-episodic-star', 0.0020, 0.1267, 10_000, 0.004),
        ('negbin-PB', 1000, 'ts-dynamic-star', 0.0020, 0.1267, 10_000, 0.004),
    ]
)
def test_oracle_regret(kind, n0, policy, expected, spread, reference_trials, floor):
    summary = pooled_oracle_regret(kind, n0, policy)
    assert summary.num_samples == ORACLE_SEEDS * ORACLE_EPISODES
    tol = agreement_tolerance(spread, reference_trials, summary.num_samples, floor)
    assert abs(summary.mean - expected) <= tol, (summary, tol)


@pytest.mark.slow
@pytest.mark.with_numba
def test_dynamic_oracle_beats_episodic_oracle_with_tight_inventory():
    dynamic = pooled_oracle_regret('negbin-PA', 30, 'ts-dynamic-star', seeds=2)
    episodic = pooled_oracle_regret('negbin-PA', 30, 'ts-episodic-star', seeds=2)
    assert dynamic.mean < episodic.mean - 5 * np.hypot(dynamic.stderr, episodic.stderr)
    assert dynamic.mean > -3 * dynamic.stderr


@pytest.mark.slow
@pytest.mark.with_numba
def test_regret_decays_towards_oracle_floor():
    config = expand_preset('A1')._replace(episodes=2000, trials=20, policies=('ts-episodic',))
    with make_executor() as executor:
        result = run_experiment(config, executor=executor)
    trials = result.trials['ts-episodic']
    early = block_regret(trials, result.rev_star, 1, 500)
    late = block_regret(trials, result.rev_star, 1500, 2000)
    # with a concentrated posterior the policy follows the season LP of the
    # true demand, so its regret levels off at the episodic oracle's
    floor = pooled_oracle_regret('formula-A1', 50, 'ts-episodic-star', seeds=2).mean
    assert late < early, (early, late)
    assert late - floor < 0.5 * (early - floor), (early, late, floor)


@pytest.mark.slow
@pytest.mark.with_numba
def test_gp_learning_curve_ordering():
    config = expand_preset('A1-gp')._replace(
        episodes=200, trials=20,
        policies=('ts-episodic', 'ts-dynamic', 'ts-fixed-star', 'ts-update-star'),
    )
    with make_executor() as executor:
        result = run_experiment(config, executor=executor)
    final = {policy: curve.final[0] for policy, curve in result.curves.items()}
    benchmark = min(final['ts-fixed-star'], final['ts-update-star'])
    assert final['ts-dynamic'] < final['ts-episodic'] < benchmark, final
    for proposed in ('ts-episodic', 'ts-dynamic'):
        assert final[proposed] < 0.6 * benchmark, final


@pytest.mark.slow
@pytest.mark.with_numba
@pytest.mark.parametrize('policy', ['ts-episodic', 'ts-dynamic'])
def test_small_setting_blocks(policy):
    env = DemandEnvironment('poisson', PriceGrid([2.0, 5.0]), [[6.0, 1.5], [3.0, 2.5]])
    n0, episodes = 8, 400
    rev_star = solve_dp(env, n0).rev_star
    prior = {'family': 'gamma', 'alpha': 1, 'beta': 0.2}
    trials = [
        run_trial(env, policy, prior, n0=n0, episodes=episodes, seed=derive_seed(5, i))
        for i in range(10)
    ]
    first = block_regret(trials, rev_star, 1, episodes // 4)
    last = block_regret(trials, rev_star, 3 * episodes // 4, episodes)
    assert last < first, (first, last)
    assert np.isfinite(first)
