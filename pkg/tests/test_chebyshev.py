import numpy as np
import pytest

from barycentric_treecode.chebyshev import (
    DBL_MIN,
    basis_matrix,
    chebyshev_points,
    eval_basis,
    map_grid,
    simple_weights,
)
from barycentric_treecode.exceptions import ChebyshevGridError


def test_chebyshev_points():
    assert chebyshev_points(1).tolist() == [1.0, -1.0]
    assert chebyshev_points(2).tolist() == [1.0, 0.0, -1.0]
    np.testing.assert_allclose(chebyshev_points(4), [1.0, np.sqrt(0.5), 0.0, -np.sqrt(0.5), -1.0], atol=1e-15)


def test_chebyshev_points_are_symmetric():
    for n in range(1, 21):
        points = chebyshev_points(n)
        assert np.array_equal(points, -points[::-1])
        assert np.all(np.diff(points) < 0)


def test_simple_weights():
    assert simple_weights(1).tolist() == [0.5, -0.5]
    assert simple_weights(2).tolist() == [0.5, -1.0, 0.5]
    assert simple_weights(3).tolist() == [0.5, -1.0, 1.0, -0.5]


def test_invalid_degree():
    for n in [0, -1, 2.5, '3', None, True]:
        with pytest.raises(ChebyshevGridError, match='A Chebyshev grid needs an integer degree'):
            chebyshev_points(n)


def test_map_grid():
    grid = map_grid(4, 2.0, 6.0)
    np.testing.assert_allclose(grid.points, [6.0, 4.0 + 2.0 * np.sqrt(0.5), 4.0, 4.0 - 2.0 * np.sqrt(0.5), 2.0])
    assert grid.points[0] == 6.0
    assert grid.points[-1] == 2.0
    assert grid.weights.tolist() == simple_weights(4).tolist()


def test_map_grid_rejects_degenerate_intervals():
    for a, b in [(1.0, 1.0), (2.0, 1.0)]:
        with pytest.raises(ChebyshevGridError, match='The lower bound must be less than the upper bound'):
            map_grid(3, a, b)


def test_grids_are_immutable():
    grid = map_grid(3, 0.0, 1.0)
    with pytest.raises(ValueError):
        grid.points[0] = 2.0
    with pytest.raises(ValueError):
        grid.weights[0] = 2.0


def test_partition_of_unity():
    """
    The basis polynomials sum to one everywhere, extrapolation included.
    """
    rng = np.random.default_rng(3)
    for n in [1, 2, 5, 7, 10, 20]:
        grid = map_grid(n, -0.3, 1.7)
        t = np.concatenate([rng.uniform(-0.3, 1.7, 200), [-0.3, 1.7]])
        np.testing.assert_allclose(basis_matrix(grid, t).sum(axis=1), 1.0, rtol=0, atol=1e-14)
        outside = basis_matrix(grid, np.array([-0.5, 2.0]))
        np.testing.assert_allclose(outside.sum(axis=1), 1.0, rtol=0, atol=1e-13)


def test_node_reproduction():
    """
    At the nodes the basis is the identity, exactly.
    """
    for n in [1, 4, 7, 12]:
        grid = map_grid(n, -2.0, 3.0)
        assert np.array_equal(basis_matrix(grid, grid.points), np.eye(n + 1))


def test_nearly_coincident_node_is_flagged():
    """
    A point within DBL_MIN of a node takes the node's unit row.
    """
    grid = map_grid(4, -1.0, 1.0)
    assert grid.points[2] == 0.0
    expected = np.zeros(5)
    expected[2] = 1.0
    for t in [DBL_MIN / 2, 5e-324, -5e-324]:
        assert np.array_equal(eval_basis(grid, t), expected)


def test_polynomial_exactness():
    """
    Interpolating a polynomial of degree <= n reproduces it.
    """
    rng = np.random.default_rng(5)
    t = rng.uniform(-1.0, 2.0, 50)
    for n in [1, 3, 6, 9]:
        grid = map_grid(n, -1.0, 2.0)
        coefficients = rng.uniform(-1.0, 1.0, n + 1)
        values_at_nodes = np.polyval(coefficients, grid.points)
        interpolated = basis_matrix(grid, t) @ values_at_nodes
        exact = np.polyval(coefficients, t)
        assert np.abs(interpolated - exact).max() <= 1e-12 * np.abs(exact).max()


def test_scale_invariance():
    """
    The basis on [a, b] at an affinely mapped point equals the basis on [-1, 1].
    """
    reference = map_grid(7, -1.0, 1.0)
    s = np.linspace(-0.99, 0.99, 41)
    for a, b in [(0.0, 1e-6), (3.0, 5.0), (-1e4, 2e4)]:
        grid = map_grid(7, a, b)
        t = 0.5 * (a + b) + 0.5 * (b - a) * s
        np.testing.assert_allclose(basis_matrix(grid, t), basis_matrix(reference, s), rtol=0, atol=1e-14)


def test_eval_basis_matches_basis_matrix():
    grid = map_grid(5, 0.0, 2.0)
    for t in [0.1, 1.3, grid.points[3], 2.5]:
        assert np.array_equal(eval_basis(grid, t), basis_matrix(grid, np.array([t]))[0])


def _interpolate(n, f, t):
    grid = map_grid(n, -1.0, 1.0)
    return basis_matrix(grid, t) @ f(grid.points)


def test_exponential_at_degree_20():
    t = np.linspace(-1.0, 1.0, 1000)
    assert np.abs(_interpolate(20, np.exp, t) - np.exp(t)).max() <= 1e-12


def test_runge_function_converges():
    """
    Chebyshev points avoid the Runge phenomenon: the error keeps falling as the degree grows.
    """

    def runge(t):
        return 1.0 / (1.0 + 25.0 * t * t)

    t = np.linspace(-1.0, 1.0, 1001)
    errors = [np.abs(_interpolate(n, runge, t) - runge(t)).max() for n in [10, 20, 30, 40]]
    assert all(later < earlier for earlier, later in zip(errors, errors[1:]))
    assert errors[-1] <= 1e-3
