"""
Kernels of the method of regularized Stokeslets (MRS).

With blob parameter epsilon > 0 the kernels are finite at r = 0 and the self term is part of every sum.
With epsilon = 0 they reduce to the singular Stokes kernels and the self term is omitted.
"""
import logging
from typing import Tuple, Union

import numpy as np

from barycentric_treecode.exceptions import KernelError
from barycentric_treecode.kernels import compiled
from barycentric_treecode.kernels.base import Kernel, SelfInteraction
from barycentric_treecode.utils import validate_epsilon

logger = logging.getLogger('barycentric_treecode')

ArrayLike = Union[float, np.ndarray]


def _scalars_from_r2(r2: ArrayLike, eps: float) -> Tuple[ArrayLike, ArrayLike, ArrayLike, ArrayLike, ArrayLike]:
    eps2 = eps * eps
    denom = r2 + eps2
    root = np.sqrt(denom)
    d3 = 8.0 * np.pi * denom * root
    d5 = d3 * denom
    d7 = d5 * denom
    h1 = (2.0 * eps2 + r2) / d3
    h2 = 1.0 / d3
    q = (5.0 * eps2 + 2.0 * r2) / d5
    d1 = (10.0 * eps2 * eps2 - 7.0 * eps2 * r2 - 2.0 * r2 * r2) / d7
    d2 = (21.0 * eps2 + 6.0 * r2) / d7
    return h1, h2, q, d1, d2


def mrs_scalars(r: float, eps: float) -> Tuple[float, float, float, float, float]:
    """
    Evaluates the five MRS scalar functions (H1, H2, Q, D1, D2) at distance r.

    :param r: target-source distance, r >= 0
    :param eps: regularization parameter, eps >= 0
    :raises: barycentric_treecode.exceptions.KernelError when r = eps = 0
    """
    if r < 0 or eps < 0:
        raise KernelError(f'Distance `{r}` and epsilon `{eps}` must both be non-negative.')
    if r == 0 and eps == 0:
        raise KernelError('The MRS functions are singular at r = 0 when epsilon = 0.')
    h1, h2, q, d1, d2 = _scalars_from_r2(float(r) * float(r), float(eps))
    return float(h1), float(h2), float(q), float(d1), float(d2)


def _check_pair(x: np.ndarray, y: np.ndarray, eps: float) -> None:
    if eps == 0 and np.array_equal(x, y):
        raise KernelError('Unregularized Stokes kernels are singular at x = y. Use epsilon > 0.')


def stokeslet_eval(x: np.ndarray, y: np.ndarray, f: np.ndarray, eps: float) -> np.ndarray:
    """
    Velocity at x induced by a regularized Stokeslet of force f at y.
    """
    x, y, f = (np.asarray(v, dtype=np.float64) for v in (x, y, f))
    _check_pair(x, y, eps)
    d = x - y
    h1, h2, _, _, _ = _scalars_from_r2(float(d @ d), eps)
    return f * h1 + (f @ d) * d * h2


def stokeslet_rotlet_eval(x: np.ndarray, y: np.ndarray, fn: np.ndarray, eps: float) -> np.ndarray:
    """
    Linear and angular velocity at x induced by a regularized Stokeslet and rotlet at y.

    :param fn: force and torque stacked as (f1, f2, f3, n1, n2, n3)
    :return: (u1, u2, u3, w1, w2, w3)
    """
    x, y, fn = (np.asarray(v, dtype=np.float64) for v in (x, y, fn))
    _check_pair(x, y, eps)
    f, n = fn[:3], fn[3:]
    d = x - y
    h1, h2, q, d1, d2 = _scalars_from_r2(float(d @ d), eps)
    u = f * h1 + (f @ d) * d * h2 + 0.5 * np.cross(n, d) * q
    w = 0.5 * np.cross(f, d) * q + 0.25 * n * d1 + 0.25 * (n @ d) * d * d2
    return np.concatenate([u, w])


class _MrsKernel(Kernel):
    def __init__(self, epsilon: float) -> None:
        self.epsilon = validate_epsilon(epsilon)

    @property
    def self_interaction(self) -> SelfInteraction:
        return SelfInteraction.INCLUDE if self.epsilon > 0 else SelfInteraction.OMIT

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}(epsilon={self.epsilon!r})'


class StokesletKernel(_MrsKernel):
    """
    Regularized Stokeslet: 3-component forces in, 3-component velocities out.
    """

    name = 'stokeslet'
    weight_dim = 3
    output_dim = 3
    kind = compiled.STOKESLET

    def pair_terms(self, diff: np.ndarray, r2: np.ndarray, weights: np.ndarray) -> np.ndarray:
        h1, h2, _, _, _ = _scalars_from_r2(r2, self.epsilon)
        f_dot_d = np.einsum('tsk,tsk->ts', np.broadcast_to(weights, diff.shape), diff)
        return h1[..., None] * weights + (f_dot_d * h2)[..., None] * diff


class StokesletRotletKernel(_MrsKernel):
    """
    Regularized Stokeslet plus rotlet: (force, torque) in, (linear, angular) velocity out.
    """

    name = 'stokeslet-rotlet'
    weight_dim = 6
    output_dim = 6
    kind = compiled.STOKESLET_ROTLET

    def pair_terms(self, diff: np.ndarray, r2: np.ndarray, weights: np.ndarray) -> np.ndarray:
        h1, h2, q, d1, d2 = _scalars_from_r2(r2, self.epsilon)
        f = np.broadcast_to(weights[..., :3], diff.shape)
        n = np.broadcast_to(weights[..., 3:], diff.shape)
        f_dot_d = np.einsum('tsk,tsk->ts', f, diff)
        n_dot_d = np.einsum('tsk,tsk->ts', n, diff)
        half_q = 0.5 * q[..., None]
        u = h1[..., None] * f + (f_dot_d * h2)[..., None] * diff + half_q * np.cross(n, diff)
        w = half_q * np.cross(f, diff) + 0.25 * d1[..., None] * n + (0.25 * n_dot_d * d2)[..., None] * diff
        return np.concatenate([u, w], axis=-1)
