import numpy as np
import pytest

# make sure utils.py can be used in other tests
import utils  # NOQA:F401
from ts_pricing.demand import PriceGrid


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def grid9():
    return PriceGrid(utils.PRICES_1_TO_9)


@pytest.fixture(scope='session')
def env_a1():
    return utils.preset_env('formula-A1')


@pytest.fixture
def pricing_ctx():
    from ts_pricing.api import PricingContext
    with PricingContext(workers=1) as ctx:
        yield ctx
