from typing import Optional, Union, overload
from typing_extensions import Literal

from ts_pricing.demand import PriceGrid
from .base import PosteriorState, SufficientStats
from .gamma import IndependentGammaPosterior
from .negbin import BetaNegBinPosterior
from .gp import GPLaplacePosterior, gp_laplace_fit, kernel_matrix, LaplaceFit

PriorFamily = Literal['gamma', 'beta-negbin', 'gp']

__all__ = [
    "PosteriorState", "SufficientStats", "IndependentGammaPosterior",
    "BetaNegBinPosterior", "GPLaplacePosterior", "gp_laplace_fit",
    "kernel_matrix", "LaplaceFit", "make_posterior", "posterior_from_dict",
    "PriorFamily",
]


@overload
def make_posterior(
    family: Literal['gamma'], *, grid: PriceGrid, horizon: int, **hyperparams,
) -> IndependentGammaPosterior:
    ...


@overload
def make_posterior(
    family: Literal['beta-negbin'], *, grid: PriceGrid, horizon: int, **hyperparams,
) -> BetaNegBinPosterior:
    ...


@overload
def make_posterior(
    family: Literal['gp'], *, grid: PriceGrid, horizon: int, **hyperparams,
) -> GPLaplacePosterior:
    ...


def make_posterior(
    family: Union[
        Literal['gamma'],
        Literal['beta-negbin'],
        Literal['gp'],
    ],
    *,
    grid: PriceGrid,
    horizon: int,
    **hyperparams,
) -> Union[
    IndependentGammaPosterior,
    BetaNegBinPosterior,
    GPLaplacePosterior,
]:
    """
    Create an empty posterior (that is, the prior) of the given family.

    Parameters
    ----------
    family
        :code:`'gamma'` (hyperparameters `alpha`, `beta`),
        :code:`'beta-negbin'` (`a`, `b`, `r`) or :code:`'gp'`
        (`sigma_t`, `sigma_p`, `jitter`, `mean`)

    Examples
    --------

    >>> grid = PriceGrid(range(1, 10))
    >>> post = make_posterior('gamma', grid=grid, horizon=10, alpha=10, beta=1)
    >>> post.stats.total_observations
    0
    """
    if family == 'gamma':
        return IndependentGammaPosterior(horizon, grid.num_prices, **hyperparams)
    elif family == 'beta-negbin':
        return BetaNegBinPosterior(horizon, grid.num_prices, **hyperparams)
    elif family == 'gp':
        return GPLaplacePosterior(grid, horizon, **hyperparams)
    else:
        raise ValueError(f"unknown prior family: {family!r}")


def posterior_from_dict(
    doc: dict, grid: PriceGrid, horizon: int, r: Optional[float] = None,
) -> PosteriorState:
    """
    Build a prior from its JSON form, for example
    :code:`{"family": "gamma", "alpha": 10, "beta": 1}`. For the
    :code:`beta-negbin` family, `r` defaults to the environment's value.
    """
    doc = dict(doc)
    family = doc.pop('family', None)
    if family == 'beta-negbin' and 'r' not in doc:
        if r is None:
            raise ValueError("beta-negbin prior needs r")
        doc['r'] = r
    try:
        return make_posterior(family, grid=grid, horizon=horizon, **doc)
    except TypeError as e:
        raise ValueError(f"invalid {family} prior fields {sorted(doc)}: {e}") from None
