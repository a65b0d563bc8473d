"""
Exact finite-horizon dynamic program for the revenue-maximizing policy
when the demand law is known.
"""
from typing import NamedTuple
import logging
import time

import numba
import numpy as np
from opentelemetry import trace

from ts_pricing.demand import DemandEnvironment, PriceGrid

logger = logging.getLogger(__name__)
tracer = trace.get_tracer(__name__)


class ValueTable(NamedTuple):
    """
    `V[t, n]` is the optimal expected revenue with `t` periods remaining and
    `n` units of inventory; `A[t - 1, n]` is the optimal action in that
    state (a price index, or the shut-off index `K`).
    """
    V: np.ndarray
    A: np.ndarray
    grid: PriceGrid

    @property
    def horizon(self) -> int:
        return self.A.shape[0]

    @property
    def n0(self) -> int:
        return self.V.shape[1] - 1

    @property
    def rev_star(self) -> float:
        return float(self.V[-1, -1])


@numba.njit(cache=True)
def _backward_induction(pmf, tails, prices, V, A):
    num_periods, num_prices, cap = pmf.shape
    shutoff = num_prices
    for t in range(1, num_periods + 1):
        period = num_periods - t
        for n in range(cap):
            best = V[t - 1, n]
            action = shutoff
            for k in range(num_prices):
                p = prices[k]
                value = tails[period, k, n] * p * n
                for d in range(n):
                    value += pmf[period, k, d] * (p * d + V[t - 1, n - d])
                if value > best:
                    best = value
                    action = k
            V[t, n] = best
            A[t - 1, n] = action


def backward_induction(
    pmf: np.ndarray, tails: np.ndarray, prices: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Run the recursion on precomputed tables `pmf[period, k, d]` and
    `tails[period, k, n] = P(D >= n)`, both of shape `(T, K, n0 + 1)` with
    0-based periods.

    Ties are broken toward the shut-off action, then toward the lowest
    price index.
    """
    num_periods, num_prices, cap = pmf.shape
    V = np.zeros((num_periods + 1, cap), dtype=np.float64)
    A = np.zeros((num_periods, cap), dtype=np.int64)
    _backward_induction(
        np.ascontiguousarray(pmf, dtype=np.float64),
        np.ascontiguousarray(tails, dtype=np.float64),
        np.ascontiguousarray(prices, dtype=np.float64),
        V, A,
    )
    return V, A


def solve_dp(env: DemandEnvironment, n0: int) -> ValueTable:
    '''
    Optimal expected revenue and policy for all states up to `n0` units of
    inventory.

    Examples
    --------

    >>> from ts_pricing.demand import PriceGrid
    >>> env = DemandEnvironment('poisson', PriceGrid([5.0]), [[2.0]])
    >>> round(solve_dp(env, n0=1).rev_star, 5)
    4.32332
    '''
    if n0 < 0:
        raise ValueError(f"n0 must be non-negative, got {n0}")
    with tracer.start_as_current_span("solve_dp") as span:
        t0 = time.perf_counter()
        pmf, tails = env.pmf_table(n0)
        V, A = backward_induction(pmf, tails, env.grid.prices)
        t1 = time.perf_counter()
        span.set_attributes({
            "ts_pricing.dp.horizon": env.horizon,
            "ts_pricing.dp.num_prices": env.grid.num_prices,
            "ts_pricing.dp.n0": n0,
        })
    logger.info(
        "solved DP for %r with n0=%d in %.1fms: rev*=%.6f",
        env, n0, (t1 - t0) * 1000, V[-1, -1],
    )
    return ValueTable(V=V, A=A, grid=env.grid)


def oracle_policy_action(table: ValueTable, elapsed: int, inventory: int) -> int:
    """
    Optimal action in period `elapsed` (1-based, counted from the start of
    the episode) with the given inventory.
    """
    horizon = table.horizon
    if not (1 <= elapsed <= horizon):
        raise ValueError(f"period {elapsed} out of range [1, {horizon}]")
    if not (0 <= inventory <= table.n0):
        raise ValueError(
            f"inventory {inventory} not covered by the value table (n0={table.n0})"
        )
    return int(table.A[horizon - elapsed, inventory])
