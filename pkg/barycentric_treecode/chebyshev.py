"""
Chebyshev points of the 2nd kind and barycentric Lagrange interpolation in 1D.

Points are stored in the natural order s_k = cos(k*pi/n), k = 0..n, which is descending.
Callers must not assume ascending order.
"""
import logging
from dataclasses import dataclass
from typing import Any, Union

import numpy as np

from barycentric_treecode.exceptions import ChebyshevGridError

logger = logging.getLogger('barycentric_treecode')

# Smallest positive normal double; a coordinate this close to a node is treated as the node itself.
DBL_MIN = np.finfo(np.float64).tiny


def _validate_degree(n: Any) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        logger.error('Chebyshev degree `%s` is invalid.', n)
        raise ChebyshevGridError(f'Degree `{n}` is invalid. A Chebyshev grid needs an integer degree n >= 1.')
    return int(n)


def chebyshev_points(n: int) -> np.ndarray:
    """
    Returns the n+1 Chebyshev points of the 2nd kind on [-1, 1].

    Evaluated as sin(pi*(n-2k)/(2n)), which equals cos(k*pi/n) but is exactly antisymmetric
    and gives exact endpoints and an exact zero in the middle for even n.

    :param n: degree, n >= 1
    :return: array [s_0, ..., s_n], descending from 1 to -1
    :raises: barycentric_treecode.exceptions.ChebyshevGridError
    """
    n = _validate_degree(n)
    k = np.arange(n + 1)
    return np.sin(np.pi * (n - 2 * k) / (2 * n))


def simple_weights(n: int) -> np.ndarray:
    """
    Returns the simple barycentric weights (-1)^k * delta_k, with delta_k = 1/2 at both ends and 1 otherwise.
    """
    n = _validate_degree(n)
    weights = np.where(np.arange(n + 1) % 2 == 0, 1.0, -1.0)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return weights


@dataclass(frozen=True)
class ChebyshevGrid1D:
    """
    Chebyshev points mapped to [a, b] together with their simple weights.

    The same weights serve every interval: a common factor in the weights cancels in the barycentric form.
    """

    degree: int
    points: np.ndarray
    weights: np.ndarray
    a: float
    b: float

    def __post_init__(self) -> None:
        self.points.setflags(write=False)
        self.weights.setflags(write=False)


def map_grid(n: int, a: float, b: float) -> ChebyshevGrid1D:
    """
    Maps the Chebyshev points of degree n linearly onto [a, b].

    :param n: degree
    :param a: lower interval bound
    :param b: upper interval bound, b > a
    :return: grid with points[0] == b and points[n] == a exactly
    :raises: barycentric_treecode.exceptions.ChebyshevGridError
    """
    a, b = float(a), float(b)
    if not a < b:
        logger.error('Interval [%s, %s] is degenerate.', a, b)
        raise ChebyshevGridError(
            f'Interval `[{a}, {b}]` is invalid. The lower bound must be less than the upper bound.'
        )
    points = 0.5 * (a + b) + 0.5 * (b - a) * chebyshev_points(n)
    points[0] = b
    points[-1] = a
    return ChebyshevGrid1D(degree=int(n), points=points, weights=simple_weights(n), a=a, b=b)


def basis_matrix(grid: ChebyshevGrid1D, t: Union[float, np.ndarray]) -> np.ndarray:
    """
    Evaluates all Lagrange basis polynomials of the grid at every point in t.

    Uses the 2nd barycentric form. Where t lies within DBL_MIN of a node s_j the row is set
    to the unit vector e_j, which resolves the removable singularity.

    :param grid: Chebyshev grid
    :param t: evaluation points, shape (T,)
    :return: array of shape (T, n+1) with entry [i, k] = L_k(t_i)
    """
    t = np.asarray(t, dtype=np.float64).reshape(-1)
    diff = t[:, None] - grid.points[None, :]
    flagged = np.abs(diff) <= DBL_MIN
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        terms = grid.weights / diff
    # subnormal distances overflow the quotient; they are nodes for every practical purpose
    flagged |= ~np.isfinite(terms)
    rows = flagged.any(axis=1)
    if rows.any():
        hits = flagged[rows]
        unit = np.zeros_like(hits, dtype=np.float64)
        unit[np.arange(hits.shape[0]), hits.argmax(axis=1)] = 1.0
        terms[rows] = unit
    return terms / terms.sum(axis=1, keepdims=True)


def eval_basis(grid: ChebyshevGrid1D, t: float) -> np.ndarray:
    """
    Returns [L_0(t), ..., L_n(t)] for a single point t.

    Extrapolation outside [a, b] is allowed and returns the value of the barycentric formula.
    """
    return basis_matrix(grid, np.array([t], dtype=np.float64))[0]
