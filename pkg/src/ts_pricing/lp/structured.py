"""
Fluid relaxation solver exploiting the problem structure: one inventory
constraint coupling independent per-period simplex rows.

For a fixed shadow price `mu` of inventory, each row simply picks the price
maximizing `lambda * (p - mu)` (or shuts off if that is not positive). The
consumption of that choice is non-increasing in `mu`, so the optimal `mu`
is found by bisection, and the rows that switch at the breakpoint are mixed
to use up the inventory exactly.
"""
from typing import NamedTuple
import logging

import numpy as np

from .plan import PricingPlan, PricesLike, plan_rows, price_array

logger = logging.getLogger(__name__)

MAX_BISECTIONS = 200


def _row_choice(rows: np.ndarray, p: np.ndarray, mu: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Per-row best price index (lowest index on ties) and whether the row
    offers it at all.
    """
    values = rows * (p[np.newaxis, :] - mu)
    best = np.argmax(values, axis=1)
    idx = np.arange(rows.shape[0])
    active = values[idx, best] > 0
    return best, active


def _consumption(rows: np.ndarray, best: np.ndarray, active: np.ndarray) -> np.ndarray:
    idx = np.arange(rows.shape[0])
    return np.where(active, rows[idx, best], 0.0)


def _plan_matrix(shape, best: np.ndarray, active: np.ndarray) -> np.ndarray:
    x = np.zeros(shape)
    idx = np.flatnonzero(active)
    x[idx, best[idx]] = 1.0
    return x


def solve_lp(lam, start: int, inventory: float, prices: PricesLike) -> PricingPlan:
    '''
    Solve the fluid relaxation

    :code:`max sum(x * lambda * p)` s.t. :code:`sum(x * lambda) <= inventory`,
    :code:`sum_k x[t, k] <= 1`, :code:`x >= 0`

    over the periods `start .. T` of the `T x K` mean-demand matrix `lam`.

    Examples
    --------

    >>> plan = solve_lp([[3, 1], [2, 1]], start=1, inventory=2, prices=[1, 2])
    >>> plan.objective
    4.0
    >>> plan.x.tolist()
    [[0.0, 1.0], [0.0, 1.0]]
    '''
    rows, p = plan_rows(lam, start, prices)
    if inventory < 0:
        raise ValueError(f"inventory must be non-negative, got {inventory}")
    n = float(inventory)
    if rows.shape[0] == 0:
        return PricingPlan(start=start, x=np.zeros(rows.shape), objective=0.0, dual_mu=0.0)

    best, active = _row_choice(rows, p, 0.0)
    cons = _consumption(rows, best, active)
    if cons.sum() <= n:
        x = _plan_matrix(rows.shape, best, active)
        return _finish(start, x, rows, p, 0.0)

    lo = 0.0
    hi = float(p.max())
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        b, a = _row_choice(rows, p, mid)
        if _consumption(rows, b, a).sum() > n:
            lo = mid
        else:
            hi = mid

    best_lo, active_lo = _row_choice(rows, p, lo)
    best_hi, active_hi = _row_choice(rows, p, hi)
    cons_lo = _consumption(rows, best_lo, active_lo)
    cons_hi = _consumption(rows, best_hi, active_hi)
    x_lo = _plan_matrix(rows.shape, best_lo, active_lo)
    x = _plan_matrix(rows.shape, best_hi, active_hi)

    remaining = n - cons_hi.sum()
    switching = np.flatnonzero(
        (best_lo != best_hi) | (active_lo != active_hi)
    )
    for i in switching:
        if remaining <= 0:
            break
        extra = cons_lo[i] - cons_hi[i]
        if extra <= 0:
            continue
        theta = min(1.0, remaining / extra)
        x[i] = theta * x_lo[i] + (1 - theta) * x[i]
        remaining -= theta * extra
    return _finish(start, x, rows, p, hi)


def _finish(start, x, rows, p, mu) -> PricingPlan:
    x = np.clip(x, 0.0, 1.0)
    objective = float(np.sum(x * rows * p[np.newaxis, :]))
    return PricingPlan(start=start, x=x, objective=objective, dual_mu=float(mu))


class RowPlan(NamedTuple):
    x: np.ndarray
    objective: float
    dual_mu: float


def solve_lp_avg(lambda_row, inventory: float, tau: int, prices: PricesLike) -> RowPlan:
    '''
    Single-period LP maximizing instantaneous revenue with the inventory
    spread evenly over the `tau` remaining periods, that is with budget
    `inventory / tau`.

    Examples
    --------

    >>> solve_lp_avg([10.0], inventory=50, tau=10, prices=[1.0])
    RowPlan(x=array([0.5]), objective=5.0, dual_mu=1.0)
    '''
    if tau < 1:
        raise ValueError(f"tau must be a positive number of periods, got {tau}")
    if inventory < 0:
        raise ValueError(f"inventory must be non-negative, got {inventory}")
    p = price_array(prices)
    row = np.asarray(lambda_row, dtype=np.float64).reshape((1, -1))
    plan = solve_lp(row, start=1, inventory=inventory / tau, prices=p)
    return RowPlan(x=plan.x[0], objective=plan.objective, dual_mu=plan.dual_mu)
