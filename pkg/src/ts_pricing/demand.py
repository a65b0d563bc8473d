"""
True demand environments over a (period x price) grid.

Periods are 1-based, price indices are 0-based and the shut-off price is the
extra action index ``K`` (see :attr:`PriceGrid.shutoff`).
"""
import json
import logging
import os
from typing import Optional, Union
from collections.abc import Sequence
from typing_extensions import Literal

import numba
import numpy as np
from scipy.special import gammaln

logger = logging.getLogger(__name__)

Family = Literal['poisson', 'negbin']

FormulaKind = Literal['formula-A1', 'formula-B', 'negbin-PA', 'negbin-PB', 'explicit']

_FORMULA_FAMILY = {
    'formula-A1': 'poisson',
    'formula-B': 'poisson',
    'negbin-PA': 'negbin',
    'negbin-PB': 'negbin',
}

DEFAULT_NEGBIN_R = 10.0


class PriceGrid:
    """
    The `K` feasible prices, in strictly increasing order, plus the
    shut-off price which is addressed as action index `K`.

    Examples
    --------

    >>> grid = PriceGrid(range(1, 10))
    >>> grid.num_prices, grid.shutoff
    (9, 9)
    >>> grid.price_of(grid.shutoff)
    0.0
    """
    def __init__(self, prices: Sequence[float]):
        arr = np.array(prices, dtype=np.float64)
        if arr.ndim != 1 or arr.shape[0] < 1:
            raise ValueError(f"need a non-empty 1D list of prices, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValueError(f"prices must be finite and non-negative, got {arr.tolist()}")
        if np.any(np.diff(arr) <= 0):
            raise ValueError(f"prices must be strictly increasing, got {arr.tolist()}")
        arr.setflags(write=False)
        self._prices = arr

    @property
    def prices(self) -> np.ndarray:
        return self._prices

    @property
    def num_prices(self) -> int:
        return self._prices.shape[0]

    @property
    def shutoff(self) -> int:
        return self._prices.shape[0]

    @property
    def max_price(self) -> float:
        return float(self._prices[-1])

    def is_shutoff(self, action: int) -> bool:
        return action == self.shutoff

    def check_action(self, action: int):
        if not (0 <= action <= self.shutoff):
            raise ValueError(
                f"action {action} out of range, must be a price index in "
                f"[0, {self.num_prices}) or the shut-off index {self.shutoff}"
            )

    def price_of(self, action: int) -> float:
        """
        Price charged for `action`; the shut-off action never sells, so its
        revenue contribution is computed with price zero.
        """
        self.check_action(action)
        if action == self.shutoff:
            return 0.0
        return float(self._prices[action])

    def to_list(self) -> list[float]:
        return self._prices.tolist()

    def __eq__(self, other):
        if not isinstance(other, PriceGrid):
            return NotImplemented
        return np.array_equal(self._prices, other._prices)

    def __repr__(self):
        return f"<PriceGrid prices={self.to_list()}>"


@numba.njit(cache=True)
def _compensated_tails_2d(rows, out):
    n = rows.shape[1]
    for i in range(rows.shape[0]):
        s = 0.0
        c = 0.0
        for d in range(n):
            tail = 1.0 - (s + c)
            out[i, d] = tail if tail > 0.0 else 0.0
            v = rows[i, d]
            t = s + v
            if abs(s) >= abs(v):
                c += (s - t) + v
            else:
                c += (v - t) + s
            s = t


def compensated_tails(pmf: np.ndarray) -> np.ndarray:
    """
    For each row of `pmf` (last axis = demand value), compute
    `tail[..., n] = 1 - sum(pmf[..., :n])` for `n = 0 .. len - 1`, using
    Neumaier-compensated summation, clamped at zero.
    """
    rows = np.ascontiguousarray(pmf, dtype=np.float64).reshape((-1, pmf.shape[-1]))
    out = np.zeros_like(rows)
    _compensated_tails_2d(rows, out)
    return out.reshape(pmf.shape)


def formula_params(
    kind: str, prices: np.ndarray, horizon: int,
) -> np.ndarray:
    """
    Evaluate one of the parametric demand laws on the (period, price) grid.

    `formula-A1` and `formula-B` return Poisson intensities, `negbin-PA` and
    `negbin-PB` return negative binomial success probabilities.
    """
    t = np.arange(1, horizon + 1, dtype=np.float64)[:, np.newaxis]
    p = np.asarray(prices, dtype=np.float64)[np.newaxis, :]
    if kind == 'formula-A1':
        return 50 * np.exp(-(p + t) / 5)
    elif kind == 'formula-B':
        return 50 * np.exp(-p / (0.5 + 5 * t / horizon))
    elif kind == 'negbin-PA':
        return -np.expm1(-(t + p) / 10)
    elif kind == 'negbin-PB':
        return -np.expm1(-p / (0.5 + 5 * t / horizon))
    raise ValueError(f"unknown demand formula: {kind!r}")


class DemandEnvironment:
    '''
    The true demand law: per (period, price) Poisson intensities, or
    negative binomial success probabilities with a shared failure count `r`.

    The negative binomial counts failures before the `r`-th success, so its
    mean is `r (1 - p) / p`.

    Parameters
    ----------
    family
        :code:`'poisson'` or :code:`'negbin'`
    grid
        The feasible prices
    params
        `T x K` table: intensities for Poisson, success probabilities for
        the negative binomial family
    r
        Failure count of the negative binomial family
    d_bar
        Optional support cap used only where boundedness is needed for
        analysis; sampling never truncates.
    kind
        Name of the formula that generated `params`, kept for serialization
    '''
    def __init__(
        self,
        family: Family,
        grid: PriceGrid,
        params,
        r: Optional[float] = None,
        d_bar: Optional[int] = None,
        kind: str = 'explicit',
    ):
        params = np.array(params, dtype=np.float64)
        if params.ndim != 2 or params.shape[0] < 1 or params.shape[1] != grid.num_prices:
            raise ValueError(
                f"params must have shape (T, {grid.num_prices}) with T >= 1, "
                f"got {params.shape}"
            )
        if not np.all(np.isfinite(params)):
            raise ValueError("params must be finite")
        if family == 'poisson':
            if np.any(params <= 0):
                raise ValueError("Poisson intensities must be strictly positive")
            r = None
        elif family == 'negbin':
            if r is None:
                r = DEFAULT_NEGBIN_R
            if not r > 0:
                raise ValueError(f"negative binomial r must be positive, got {r}")
            if np.any(params <= 0) or np.any(params >= 1):
                raise ValueError("negative binomial success probabilities must lie in (0, 1)")
            r = float(r)
        else:
            raise ValueError(f"unknown demand family: {family!r}")
        if d_bar is not None and d_bar < 0:
            raise ValueError(f"d_bar must be non-negative, got {d_bar}")
        params.setflags(write=False)
        self._family = family
        self._grid = grid
        self._params = params
        self._r = r
        self._d_bar = d_bar
        self._kind = kind

    @classmethod
    def from_formula(
        cls,
        kind: FormulaKind,
        prices: Sequence[float],
        horizon: int,
        r: Optional[float] = None,
        d_bar: Optional[int] = None,
    ) -> "DemandEnvironment":
        if horizon < 1:
            raise ValueError(f"horizon must be positive, got {horizon}")
        grid = PriceGrid(prices)
        family = _FORMULA_FAMILY.get(kind)
        if family is None:
            raise ValueError(f"unknown demand formula: {kind!r}")
        params = formula_params(kind, grid.prices, horizon)
        return cls(family=family, grid=grid, params=params, r=r, d_bar=d_bar, kind=kind)

    @classmethod
    def from_dict(cls, doc: dict) -> "DemandEnvironment":
        '''
        Build an environment from its JSON form::

            {"family": "poisson", "T": 10, "prices": [1, 2, ...],
             "params": {"kind": "formula-A1"}}

        For :code:`"kind": "explicit"`, :code:`params.table` holds the `T x K`
        parameter table.
        '''
        try:
            prices = doc['prices']
            horizon = int(doc['T'])
            params = doc.get('params', {})
            kind = params['kind']
        except KeyError as e:
            raise ValueError(f"environment document is missing field {e}") from None
        family = doc.get('family')
        r = doc.get('r')
        d_bar = doc.get('d_bar')
        if kind == 'explicit':
            table = np.asarray(params.get('table'), dtype=np.float64)
            if table.ndim != 2 or table.shape[0] != horizon:
                raise ValueError(
                    f"explicit table must have T={horizon} rows, got shape {table.shape}"
                )
            if family is None:
                raise ValueError("explicit environments need a family")
            return cls(
                family=family, grid=PriceGrid(prices), params=table, r=r, d_bar=d_bar,
            )
        expected = _FORMULA_FAMILY.get(kind)
        if expected is None:
            raise ValueError(f"unknown demand formula: {kind!r}")
        if family is not None and family != expected:
            raise ValueError(f"formula {kind} needs family {expected!r}, got {family!r}")
        return cls.from_formula(kind, prices=prices, horizon=horizon, r=r, d_bar=d_bar)

    def to_dict(self) -> dict:
        doc: dict = {
            'family': self._family,
            'T': self.horizon,
            'prices': self._grid.to_list(),
        }
        if self._kind == 'explicit':
            doc['params'] = {'kind': 'explicit', 'table': self._params.tolist()}
        else:
            doc['params'] = {'kind': self._kind}
        if self._r is not None:
            doc['r'] = self._r
        if self._d_bar is not None:
            doc['d_bar'] = self._d_bar
        return doc

    @property
    def family(self) -> Family:
        return self._family

    @property
    def grid(self) -> PriceGrid:
        return self._grid

    @property
    def horizon(self) -> int:
        return self._params.shape[0]

    @property
    def params(self) -> np.ndarray:
        return self._params

    @property
    def r(self) -> Optional[float]:
        return self._r

    @property
    def d_bar(self) -> Optional[int]:
        return self._d_bar

    def _check_cell(self, t: int, k: int):
        if not (1 <= t <= self.horizon):
            raise ValueError(f"period {t} out of range [1, {self.horizon}]")
        if not (0 <= k < self._grid.num_prices):
            raise ValueError(f"price index {k} out of range [0, {self._grid.num_prices})")

    def mean_demand(self) -> np.ndarray:
        """
        The `T x K` matrix of mean demands; the shut-off column is not
        included (it is zero by convention).
        """
        if self._family == 'poisson':
            return self._params.copy()
        p = self._params
        return self._r * (1 - p) / p

    def sample_demand(self, t: int, action: int, rng: np.random.Generator) -> int:
        self._grid.check_action(action)
        if action == self._grid.shutoff:
            if not (1 <= t <= self.horizon):
                raise ValueError(f"period {t} out of range [1, {self.horizon}]")
            return 0
        self._check_cell(t, action)
        param = self._params[t - 1, action]
        if self._family == 'poisson':
            return int(rng.poisson(param))
        return int(rng.negative_binomial(self._r, param))

    def _log_pmf(self, params: np.ndarray, d: np.ndarray) -> np.ndarray:
        params = params[..., np.newaxis]
        if self._family == 'poisson':
            return d * np.log(params) - params - gammaln(d + 1)
        r = self._r
        return (
            gammaln(d + r) - gammaln(r) - gammaln(d + 1)
            + r * np.log(params) + d * np.log1p(-params)
        )

    def log_pmf(self, t: int, k: int, d) -> np.ndarray:
        self._check_cell(t, k)
        d = np.asarray(d, dtype=np.float64)
        return self._log_pmf(self._params[t - 1, k:k + 1], d)[0]

    def capped_demand_pmf(self, t: int, k: int, cap: int) -> np.ndarray:
        """
        Exact distribution of `min(D, cap)`: entry `d < cap` is `P(D = d)`,
        entry `cap` is `P(D >= cap)`.
        """
        self._check_cell(t, k)
        if cap < 0:
            raise ValueError(f"cap must be non-negative, got {cap}")
        d = np.arange(cap + 1, dtype=np.float64)
        pmf = np.exp(self._log_pmf(self._params[t - 1, k:k + 1], d)[0])
        tails = compensated_tails(pmf)
        pmf[cap] = tails[cap]
        return pmf

    def pmf_table(self, cap: int) -> tuple[np.ndarray, np.ndarray]:
        """
        Precompute `pmf[t, k, d] = P(D = d)` and `tail[t, k, n] = P(D >= n)`
        for all cells and `0 <= d, n <= cap`; both arrays have shape
        `(T, K, cap + 1)` and are indexed with 0-based periods.
        """
        if cap < 0:
            raise ValueError(f"cap must be non-negative, got {cap}")
        d = np.arange(cap + 1, dtype=np.float64)
        pmf = np.exp(self._log_pmf(self._params, d))
        tails = compensated_tails(pmf)
        return pmf, tails

    def __repr__(self):
        return (
            f"<DemandEnvironment family={self._family} kind={self._kind} "
            f"T={self.horizon} K={self._grid.num_prices}>"
        )


def load_environment(path: Union[str, os.PathLike]) -> DemandEnvironment:
    with open(path) as f:
        doc = json.load(f)
    logger.info("loaded environment from %s", path)
    return DemandEnvironment.from_dict(doc)
