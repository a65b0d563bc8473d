from typing import Optional, Union, overload
from typing_extensions import Literal

import numpy as np

from ts_pricing.demand import PriceGrid
from ts_pricing.posterior import PosteriorState
from .base import Policy, sample_action
from .learning import LearningPolicy, TSEpisodic, TSDynamic, TSFixedStar, TSUpdateStar
from .oracle import OraclePolicy, TSEpisodicStar, TSDynamicStar

PolicyKind = Literal[
    'ts-episodic', 'ts-dynamic', 'ts-fixed-star', 'ts-update-star',
    'ts-episodic-star', 'ts-dynamic-star',
]

LEARNING_KINDS = ('ts-episodic', 'ts-dynamic', 'ts-fixed-star', 'ts-update-star')
ORACLE_KINDS = ('ts-episodic-star', 'ts-dynamic-star')
POLICY_KINDS = LEARNING_KINDS + ORACLE_KINDS

_LEARNING = {
    'ts-episodic': TSEpisodic,
    'ts-dynamic': TSDynamic,
    'ts-fixed-star': TSFixedStar,
    'ts-update-star': TSUpdateStar,
}

_ORACLE = {
    'ts-episodic-star': TSEpisodicStar,
    'ts-dynamic-star': TSDynamicStar,
}

__all__ = [
    "Policy", "LearningPolicy", "OraclePolicy", "TSEpisodic", "TSDynamic",
    "TSFixedStar", "TSUpdateStar", "TSEpisodicStar", "TSDynamicStar",
    "make_policy", "sample_action", "PolicyKind", "POLICY_KINDS",
    "LEARNING_KINDS", "ORACLE_KINDS",
]


@overload
def make_policy(
    kind: Literal['ts-episodic'], *, grid: PriceGrid, horizon: int,
    posterior: Optional[PosteriorState] = None, true_means: Optional[np.ndarray] = None,
) -> TSEpisodic:
    ...


@overload
def make_policy(
    kind: Literal['ts-dynamic'], *, grid: PriceGrid, horizon: int,
    posterior: Optional[PosteriorState] = None, true_means: Optional[np.ndarray] = None,
) -> TSDynamic:
    ...


@overload
def make_policy(
    kind: Literal['ts-fixed-star'], *, grid: PriceGrid, horizon: int,
    posterior: Optional[PosteriorState] = None, true_means: Optional[np.ndarray] = None,
) -> TSFixedStar:
    ...


@overload
def make_policy(
    kind: Literal['ts-update-star'], *, grid: PriceGrid, horizon: int,
    posterior: Optional[PosteriorState] = None, true_means: Optional[np.ndarray] = None,
) -> TSUpdateStar:
    ...


@overload
def make_policy(
    kind: Literal['ts-episodic-star'], *, grid: PriceGrid, horizon: int,
    posterior: Optional[PosteriorState] = None, true_means: Optional[np.ndarray] = None,
) -> TSEpisodicStar:
    ...


@overload
def make_policy(
    kind: Literal['ts-dynamic-star'], *, grid: PriceGrid, horizon: int,
    posterior: Optional[PosteriorState] = None, true_means: Optional[np.ndarray] = None,
) -> TSDynamicStar:
    ...


def make_policy(
    kind: PolicyKind,
    *,
    grid: PriceGrid,
    horizon: int,
    posterior: Optional[PosteriorState] = None,
    true_means: Optional[np.ndarray] = None,
) -> Union[
    TSEpisodic, TSDynamic, TSFixedStar, TSUpdateStar, TSEpisodicStar, TSDynamicStar,
]:
    """
    Create a policy by name.

    Parameters
    ----------
    kind
        One of :code:`ts-episodic`, :code:`ts-dynamic`, :code:`ts-fixed-star`,
        :code:`ts-update-star` (these need a `posterior`) or
        :code:`ts-episodic-star`, :code:`ts-dynamic-star` (these need the
        `true_means` of the environment)
    """
    if kind in _LEARNING:
        if posterior is None:
            raise ValueError(f"policy {kind} needs a posterior")
        return _LEARNING[kind](grid, horizon, posterior)
    elif kind in _ORACLE:
        if true_means is None:
            raise ValueError(f"policy {kind} needs the true mean demand")
        return _ORACLE[kind](grid, horizon, true_means)
    raise ValueError(
        f"unknown policy {kind!r}, expected one of {', '.join(POLICY_KINDS)}"
    )
