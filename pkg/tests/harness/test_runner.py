import csv
import json

import numpy as np
import pytest

from ts_pricing.harness.config import expand_preset
from ts_pricing.harness.executor import (
    InlineTrialExecutor, MAX_WORKERS_ENV, ProcessPoolTrialExecutor, default_workers,
    make_executor,
)
from ts_pricing.harness.output import REGRET_HEADER, TRACE_HEADER, write_value_table_csv
from ts_pricing.harness.runner import make_tasks, run_experiment
from ts_pricing.dp import solve_dp

from utils import preset_env


POLICIES = ('ts-episodic', 'ts-dynamic-star')


def _small(tmp_path, **kwargs):
    return expand_preset('A1')._replace(
        trials=2, episodes=3, policies=POLICIES, output=str(tmp_path), **kwargs,
    )


def _rows(path):
    with open(path, newline='') as f:
        return list(csv.reader(f))


def test_make_tasks():
    config = expand_preset('A1')._replace(trials=3, policies=POLICIES)
    tasks = make_tasks(config)
    assert len(tasks) == 6
    seeds = {(t.policy, t.trial_index): t.seed for t in tasks}
    # all policies of a trial see the same seed
    for i in range(3):
        assert seeds[('ts-episodic', i)] == seeds[('ts-dynamic-star', i)]
    assert len({t.seed for t in tasks}) == 3


def test_regret_csv(tmp_path):
    config = _small(tmp_path)
    result = run_experiment(config, executor=InlineTrialExecutor())
    rows = _rows(tmp_path / 'regret.csv')
    assert tuple(rows[0]) == REGRET_HEADER
    assert len(rows) == 1 + 2 * 3 * 2
    assert [r[2] for r in rows[1:]] == ['ts-episodic'] * 6 + ['ts-dynamic-star'] * 6
    first = rows[1:4]
    revenues = [float(r[3]) for r in first]
    assert float(first[-1][4]) == pytest.approx(sum(revenues))
    assert float(first[-1][5]) == pytest.approx(1 - sum(revenues) / (3 * result.rev_star))
    assert sorted(result.files) == sorted(
        str(tmp_path / name) for name in ('regret.csv', 'summary.json')
    )


def test_summary(tmp_path):
    config = _small(tmp_path)
    result = run_experiment(config, executor=InlineTrialExecutor())
    with open(tmp_path / 'summary.json') as f:
        summary = json.load(f)
    assert summary['rev_star'] == pytest.approx(330.08, abs=0.02)
    assert set(summary['policies']) == set(POLICIES)
    assert 'oracle' in summary['policies']['ts-dynamic-star']
    assert 'oracle' not in summary['policies']['ts-episodic']
    assert summary['config']['trials'] == 2
    assert 'ts_pricing' in summary['provenance']
    mean, stderr = result.curves['ts-episodic'].final
    assert summary['policies']['ts-episodic']['final_relative_regret'] == {
        'mean': mean, 'stderr': stderr,
    }


@pytest.mark.functional
@pytest.mark.parametrize('workers', [1, 4, 16])
def test_worker_count_does_not_change_results(tmp_path, workers):
    inline_dir = tmp_path / 'inline'
    pool_dir = tmp_path / 'pool'
    run_experiment(_small(inline_dir)._replace(trials=5), executor=InlineTrialExecutor())
    with ProcessPoolTrialExecutor(workers=workers) as executor:
        run_experiment(_small(pool_dir)._replace(trials=5), executor=executor)
    for name in ('regret.csv', 'summary.json'):
        assert (inline_dir / name).read_bytes() == (pool_dir / name).read_bytes(), name


def test_traces_csv(tmp_path):
    config = _small(tmp_path, traces=True)
    result = run_experiment(config, executor=InlineTrialExecutor())
    rows = _rows(tmp_path / 'traces.csv')
    assert tuple(rows[0]) == TRACE_HEADER
    assert len(rows) == 1 + 2 * 3 * 2 * 10
    for trial in result.trials['ts-episodic']:
        assert len(trial.traces) == 3
    episode_revenue = sum(float(r[8]) for r in rows[1:11])
    assert episode_revenue == pytest.approx(result.trials['ts-episodic'][0].revenues[0])


def test_bayesian_summary(tmp_path):
    config = _small(tmp_path)._replace(trials=2, episodes=2)
    result = run_experiment(config, executor=InlineTrialExecutor(), bayesian=True)
    assert set(result.summary['bayesian_regret']) == {'ts-episodic'}
    assert np.isfinite(result.summary['bayesian_regret']['ts-episodic']['mean'])


def test_no_output_dir():
    config = expand_preset('A1')._replace(trials=1, episodes=1, policies=('ts-dynamic-star',))
    result = run_experiment(config, executor=InlineTrialExecutor())
    assert result.files == []
    assert result.trials['ts-dynamic-star'][0].revenues.shape == (1,)


def test_value_table_csv(tmp_path):
    table = solve_dp(preset_env('formula-A1', horizon=3), n0=4)
    path = tmp_path / 'V.csv'
    write_value_table_csv(path, table)
    rows = _rows(path)
    assert rows[0] == ['t', 'n0', 'n1', 'n2', 'n3', 'n4']
    assert len(rows) == 1 + 4
    assert rows[1][1:] == ['0'] * 5
    assert float(rows[4][5]) == pytest.approx(table.rev_star, rel=1e-9)
    assert (tmp_path / 'V.csv').read_bytes().count(b'\r') == 0


def test_default_workers(monkeypatch):
    monkeypatch.setenv(MAX_WORKERS_ENV, '1')
    assert default_workers() == 1
    assert isinstance(make_executor(), InlineTrialExecutor)
    monkeypatch.setenv(MAX_WORKERS_ENV, 'many')
    with pytest.raises(ValueError) as m:
        default_workers()
    m.match(rf'^{MAX_WORKERS_ENV} must be an integer')
    monkeypatch.setenv(MAX_WORKERS_ENV, '0')
    with pytest.raises(ValueError) as m:
        default_workers()
    m.match(rf'^{MAX_WORKERS_ENV} must be positive')


def test_pool_needs_workers():
    with pytest.raises(ValueError) as m:
        ProcessPoolTrialExecutor(workers=0)
    m.match(r'^need at least one worker')
