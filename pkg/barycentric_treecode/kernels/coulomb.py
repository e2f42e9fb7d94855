import numpy as np

from barycentric_treecode.exceptions import KernelError
from barycentric_treecode.kernels import compiled
from barycentric_treecode.kernels.base import Kernel, SelfInteraction


def coulomb_eval(x: np.ndarray, y: np.ndarray, q: float) -> float:
    """
    Potential q / |x - y| of a point charge q at y, evaluated at x.

    :raises: barycentric_treecode.exceptions.KernelError when x = y
    """
    d = np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)
    r = float(np.sqrt(d @ d))
    if r == 0.0:
        raise KernelError('The Coulomb kernel is singular at x = y.')
    return float(q) / r


class CoulombKernel(Kernel):
    """
    Scalar 1/r potential. Singular at r = 0, so the i = j term is omitted.
    """

    name = 'coulomb'
    weight_dim = 1
    output_dim = 1
    kind = compiled.COULOMB

    def __init__(self, epsilon: float = 0.0) -> None:
        # accepted for a uniform registry signature, the kernel has no regularization
        self.epsilon = 0.0

    @property
    def self_interaction(self) -> SelfInteraction:
        return SelfInteraction.OMIT

    def pair_terms(self, diff: np.ndarray, r2: np.ndarray, weights: np.ndarray) -> np.ndarray:
        return weights / np.sqrt(r2)[..., None]
