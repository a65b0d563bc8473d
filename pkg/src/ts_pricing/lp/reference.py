"""
Generic dense tableau simplex, used to cross-check the structured solver.
"""
import logging
from typing import Optional

import numpy as np

from ts_pricing.common import SimplexCyclingError
from .plan import PricingPlan, PricesLike, plan_rows

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-12


def simplex_max(c: np.ndarray, A: np.ndarray, b: np.ndarray, max_pivots: Optional[int] = None):
    '''
    Maximize `c @ x` s.t. `A @ x <= b`, `x >= 0` for `b >= 0`, starting from
    the slack basis and pivoting with Bland's rule.

    Returns `(x, objective, duals)`; `duals[i]` is the shadow price of
    constraint `i`.
    '''
    m, nv = A.shape
    if np.any(b < 0):
        raise ValueError("right-hand side must be non-negative for the slack basis")
    if max_pivots is None:
        max_pivots = 50 * (m + nv) + 100
    tab = np.zeros((m + 1, nv + m + 1))
    tab[:m, :nv] = A
    tab[:m, nv:nv + m] = np.eye(m)
    tab[:m, -1] = b
    tab[m, :nv] = -c
    basis = list(range(nv, nv + m))

    for pivots in range(max_pivots + 1):
        reduced = tab[m, :-1]
        candidates = np.flatnonzero(reduced < -PIVOT_TOL)
        if candidates.size == 0:
            break
        if pivots == max_pivots:
            raise SimplexCyclingError(
                f"simplex did not terminate within {max_pivots} pivots"
            )
        col = int(candidates[0])
        column = tab[:m, col]
        leave = None
        best_ratio = np.inf
        for i in range(m):
            if column[i] > PIVOT_TOL:
                ratio = tab[i, -1] / column[i]
                if ratio < best_ratio - PIVOT_TOL or (
                    abs(ratio - best_ratio) <= PIVOT_TOL and basis[i] < basis[leave]
                ):
                    best_ratio = ratio
                    leave = i
        if leave is None:
            raise ValueError("LP is unbounded")
        tab[leave] /= tab[leave, col]
        for i in range(m + 1):
            if i != leave and tab[i, col] != 0:
                tab[i] -= tab[i, col] * tab[leave]
        basis[leave] = col
    logger.debug("simplex finished after %d pivots", pivots)

    x = np.zeros(nv + m)
    for i, var in enumerate(basis):
        x[var] = tab[i, -1]
    duals = tab[m, nv:nv + m].copy()
    return x[:nv], float(tab[m, -1]), duals


def solve_lp_reference(lam, start: int, inventory: float, prices: PricesLike) -> PricingPlan:
    """
    Same problem as :func:`ts_pricing.lp.solve_lp`, written out as a dense
    LP with one variable per (period, price) and solved by
    :func:`simplex_max`.
    """
    rows, p = plan_rows(lam, start, prices)
    if inventory < 0:
        raise ValueError(f"inventory must be non-negative, got {inventory}")
    num_rows, num_prices = rows.shape
    if num_rows == 0:
        return PricingPlan(start=start, x=np.zeros(rows.shape), objective=0.0, dual_mu=0.0)
    nv = num_rows * num_prices
    A = np.zeros((num_rows + 1, nv))
    for i in range(num_rows):
        A[i, i * num_prices:(i + 1) * num_prices] = 1.0
    A[num_rows] = rows.ravel()
    b = np.ones(num_rows + 1)
    b[num_rows] = float(inventory)
    c = (rows * p[np.newaxis, :]).ravel()
    x, _, duals = simplex_max(c, A, b)
    x = np.clip(x.reshape(rows.shape), 0.0, 1.0)
    objective = float(np.sum(x * rows * p[np.newaxis, :]))
    return PricingPlan(start=start, x=x, objective=objective, dual_mu=max(0.0, float(duals[-1])))
