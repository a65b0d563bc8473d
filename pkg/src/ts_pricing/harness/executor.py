"""
Executors running independent trials, in the current process or in a pool
of worker processes. Results are identical for any worker count because
every trial derives its randomness from `(base_seed, trial_index)` only.
"""
from typing import NamedTuple, Optional, Protocol
from collections.abc import Iterable, Iterator
import concurrent.futures
import logging
import os

import psutil

from ts_pricing.common import set_worker_name
from ts_pricing.demand import DemandEnvironment
from ts_pricing.sim import TrialResult, run_trial

logger = logging.getLogger(__name__)

MAX_WORKERS_ENV = "TS_PRICING_MAX_WORKERS"


class TrialTask(NamedTuple):
    trial_index: int
    policy: str
    seed: int
    environment: dict
    prior: dict
    n0: int
    episodes: int
    record_traces: bool = False


def run_task(task: TrialTask) -> TrialResult:
    env = DemandEnvironment.from_dict(task.environment)
    return run_trial(
        env,
        policy_kind=task.policy,
        prior=task.prior,
        n0=task.n0,
        episodes=task.episodes,
        seed=task.seed,
        trial_index=task.trial_index,
        record_traces=task.record_traces,
    )


def default_workers() -> int:
    """
    Number of physical cores, capped by the :code:`TS_PRICING_MAX_WORKERS`
    environment variable if it is set.
    """
    workers = psutil.cpu_count(logical=False) or 1
    cap = os.environ.get(MAX_WORKERS_ENV)
    if cap:
        try:
            cap_value = int(cap)
        except ValueError:
            raise ValueError(f"{MAX_WORKERS_ENV} must be an integer, got {cap!r}") from None
        if cap_value < 1:
            raise ValueError(f"{MAX_WORKERS_ENV} must be positive, got {cap_value}")
        workers = min(workers, cap_value)
    return workers


class TrialExecutor(Protocol):
    def map(self, tasks: Iterable[TrialTask]) -> Iterator[TrialResult]:
        """
        Run all tasks, yielding results in any order.
        """
        ...

    def close(self):
        ...


class InlineTrialExecutor:
    """
    Runs the trials one after another in the current process.
    """
    def map(self, tasks: Iterable[TrialTask]) -> Iterator[TrialResult]:
        for task in tasks:
            yield run_task(task)

    def close(self):
        pass

    def __enter__(self):
        return self

    def __exit__(self, *args, **kwargs):
        self.close()


def _worker_init():
    set_worker_name("ts-pricing-worker")


class ProcessPoolTrialExecutor:
    """
    Runs trials in a pool of worker processes; idle workers pick up the
    next pending trial.
    """
    def __init__(self, workers: Optional[int] = None):
        if workers is None:
            workers = default_workers()
        if workers < 1:
            raise ValueError(f"need at least one worker, got {workers}")
        self.workers = workers
        self._pool = concurrent.futures.ProcessPoolExecutor(
            max_workers=workers, initializer=_worker_init,
        )

    def map(self, tasks: Iterable[TrialTask]) -> Iterator[TrialResult]:
        futures = [self._pool.submit(run_task, task) for task in tasks]
        try:
            for future in concurrent.futures.as_completed(futures):
                yield future.result()
        finally:
            for future in futures:
                future.cancel()

    def close(self):
        self._pool.shutdown(wait=True, cancel_futures=True)

    def __enter__(self):
        return self

    def __exit__(self, *args, **kwargs):
        self.close()


def make_executor(workers: Optional[int] = None):
    """
    A process pool for more than one worker, otherwise an inline executor.
    """
    if workers is None:
        workers = default_workers()
    if workers <= 1:
        return InlineTrialExecutor()
    logger.info("starting process pool with %d workers", workers)
    return ProcessPoolTrialExecutor(workers=workers)
