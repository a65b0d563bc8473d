from typing import NamedTuple, Union
from collections.abc import Sequence

import numpy as np

from ts_pricing.demand import PriceGrid

PricesLike = Union[PriceGrid, Sequence[float], np.ndarray]

ROW_SUM_TOL = 1e-9
ENTRY_TOL = 1e-12
SUPPORT_TOL = 1e-9
OBJECTIVE_RTOL = 1e-9


def inventory_tol(inventory: float) -> float:
    return 1e-6 * max(1.0, inventory)


class PricingPlan(NamedTuple):
    """
    Solution of the fluid relaxation for the remaining periods
    `start .. T`: row `i` of `x` holds the price-mixing probabilities of
    period `start + i`, the residual `1 - sum(x[i])` goes to the shut-off
    price.
    """
    start: int
    x: np.ndarray
    objective: float
    dual_mu: float

    @property
    def num_rows(self) -> int:
        return self.x.shape[0]

    def row(self, t: int) -> np.ndarray:
        """
        Mixing probabilities for period `t` (1-based, absolute).
        """
        i = t - self.start
        if not (0 <= i < self.x.shape[0]):
            raise ValueError(
                f"period {t} not covered by plan starting at {self.start} "
                f"with {self.x.shape[0]} rows"
            )
        return self.x[i]

    def to_dict(self) -> dict:
        return {
            "start": self.start,
            "objective": self.objective,
            "dual_mu": self.dual_mu,
            "x": self.x.tolist(),
        }


class CertificateReport(NamedTuple):
    passed: bool
    violations: list[str]

    def __bool__(self):
        return self.passed


def price_array(prices: PricesLike) -> np.ndarray:
    if isinstance(prices, PriceGrid):
        return prices.prices
    arr = np.asarray(prices, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"prices must be 1D, got shape {arr.shape}")
    return arr


def plan_rows(lam, start: int, prices: PricesLike) -> tuple[np.ndarray, np.ndarray]:
    """
    Validate an LP instance and return `(lambda rows start..T, prices)`.
    """
    p = price_array(prices)
    lam = np.asarray(lam, dtype=np.float64)
    if lam.ndim != 2 or lam.shape[1] != p.shape[0]:
        raise ValueError(
            f"lambda must have shape (T, {p.shape[0]}), got {lam.shape}"
        )
    if not np.all(np.isfinite(lam)) or np.any(lam < 0):
        raise ValueError("lambda entries must be finite and non-negative")
    if start < 1:
        raise ValueError(f"start period must be >= 1, got {start}")
    return lam[start - 1:], p


def check_certificate(
    plan: PricingPlan, lam, inventory: float, prices: PricesLike,
) -> CertificateReport:
    '''
    Check the KKT conditions of `plan` for the LP over periods
    `plan.start .. T` with the given inventory.

    A plan passes iff it is feasible, complementary slackness holds for its
    `dual_mu`, and every row puts its mass only on the maximizers of
    `lambda * (p - dual_mu)`, filling the row completely where that maximum
    is positive.
    '''
    rows, p = plan_rows(lam, plan.start, prices)
    x = np.asarray(plan.x, dtype=np.float64)
    violations: list[str] = []
    if x.shape != rows.shape:
        return CertificateReport(
            passed=False,
            violations=[f"plan has shape {x.shape}, instance rows have shape {rows.shape}"],
        )
    n = float(inventory)

    # feasibility
    if np.any(x < -ENTRY_TOL) or np.any(x > 1 + ENTRY_TOL):
        violations.append(f"entries outside [0, 1]: min {x.min():g}, max {x.max():g}")
    row_sums = x.sum(axis=1)
    for i in np.flatnonzero(row_sums > 1 + ROW_SUM_TOL):
        violations.append(f"row {plan.start + i} sums to {row_sums[i]!r} > 1")
    consumption = float(np.sum(x * rows))
    if consumption > n + inventory_tol(n):
        violations.append(f"consumption {consumption!r} exceeds inventory {n!r}")
    objective = float(np.sum(x * rows * p[np.newaxis, :]))
    if abs(objective - plan.objective) > OBJECTIVE_RTOL * max(1.0, abs(objective)):
        violations.append(
            f"reported objective {plan.objective!r} differs from recomputed {objective!r}"
        )
    mu = float(plan.dual_mu)
    if mu < 0:
        violations.append(f"dual_mu {mu!r} is negative")

    # complementary slackness
    if mu * (n - consumption) > inventory_tol(n):
        violations.append(
            f"complementary slackness: dual_mu {mu!r} with slack {n - consumption!r}"
        )

    # row support
    values = rows * (p[np.newaxis, :] - mu)
    for i in range(rows.shape[0]):
        t = plan.start + i
        best = float(values[i].max()) if values.shape[1] else 0.0
        tol = SUPPORT_TOL * max(1.0, abs(best))
        support = np.flatnonzero(x[i] > SUPPORT_TOL)
        if support.size:
            if best < -SUPPORT_TOL:
                violations.append(f"row {t} offers prices with negative reduced value {best!r}")
            off = [k for k in support if values[i, k] < best - tol]
            if off:
                violations.append(f"row {t} puts mass on non-maximizing prices {off}")
        if best > SUPPORT_TOL and abs(row_sums[i] - 1) > ROW_SUM_TOL:
            violations.append(
                f"row {t} has positive reduced value {best!r} but sums to {row_sums[i]!r}"
            )
    return CertificateReport(passed=not violations, violations=violations)
