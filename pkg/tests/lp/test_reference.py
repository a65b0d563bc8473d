import numpy as np
from numpy.testing import assert_allclose
import pytest

from ts_pricing.common import SimplexCyclingError
from ts_pricing.lp import solve_lp, solve_lp_reference
from ts_pricing.lp.reference import simplex_max


@pytest.mark.parametrize(
    'lam,prices,inventory,expected', [
        ([[3, 1], [2, 1]], [1, 2], 2, 4.0),
        ([[2.0]], [5.0], 10, 10.0),
        ([[2.0]], [5.0], 1, 5.0),
        ([[1.0], [1.0], [1.0]], [1.0], 1.5, 1.5),
    ]
)
def test_known_instances(lam, prices, inventory, expected):
    ref = solve_lp_reference(lam, start=1, inventory=inventory, prices=prices)
    assert_allclose(ref.objective, expected, rtol=1e-12)
    plan = solve_lp(lam, start=1, inventory=inventory, prices=prices)
    assert_allclose(plan.objective, ref.objective, rtol=1e-9)


def test_empty_horizon():
    ref = solve_lp_reference([[1.0, 2.0], [3.0, 4.0]], start=3, inventory=5, prices=[1, 2])
    assert ref.objective == 0.0
    assert ref.x.shape == (0, 2)


def test_binding_dual():
    ref = solve_lp_reference([[2.0]], start=1, inventory=1, prices=[5.0])
    assert_allclose(ref.x, [[0.5]])
    assert_allclose(ref.dual_mu, 5.0)


def test_simplex_textbook():
    # max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
    c = np.array([3.0, 5.0])
    A = np.array([[1.0, 0.0], [0.0, 2.0], [3.0, 2.0]])
    b = np.array([4.0, 12.0, 18.0])
    x, obj, duals = simplex_max(c, A, b)
    assert_allclose(x, [2, 6])
    assert_allclose(obj, 36)
    assert_allclose(duals, [0, 1.5, 1])


def test_simplex_pivot_guard():
    c = np.array([3.0, 5.0])
    A = np.array([[1.0, 0.0], [0.0, 2.0], [3.0, 2.0]])
    b = np.array([4.0, 12.0, 18.0])
    with pytest.raises(SimplexCyclingError) as m:
        simplex_max(c, A, b, max_pivots=1)
    m.match(r'^simplex did not terminate within 1 pivots')


def test_simplex_invalid():
    with pytest.raises(ValueError) as m:
        simplex_max(np.ones(1), np.ones((1, 1)), np.array([-1.0]))
    m.match(r'^right-hand side must be non-negative')
    with pytest.raises(ValueError) as m:
        simplex_max(np.ones(1), -np.ones((1, 1)), np.array([1.0]))
    m.match(r'^LP is unbounded')
