import logging
from abc import ABC, abstractmethod
from enum import Enum
from typing import Optional

import numpy as np

from barycentric_treecode.exceptions import KernelError
from barycentric_treecode.kernels import compiled

logger = logging.getLogger('barycentric_treecode')

# Upper bound on target-source pairs held in memory at once by `Kernel.interact_numpy`
PAIR_CHUNK = 1 << 16


class SelfInteraction(str, Enum):
    INCLUDE = 'include'
    OMIT = 'omit'


class Kernel(ABC):
    """
    A pairwise interaction k(x, y) acting linearly on a source weight vector.

    Subclasses only describe the point-pair contraction (`pair_terms`). The built-in kernels also set
    `kind`, which selects their compiled loop in `barycentric_treecode.kernels.compiled`; kernels
    without one are evaluated with numpy.
    """

    name: str = ''
    weight_dim: int = 1
    output_dim: int = 1
    kind: Optional[int] = None

    @property
    @abstractmethod
    def self_interaction(self) -> SelfInteraction:
        """
        Whether the i = j term of a sum is evaluated (regularized kernels) or omitted (singular kernels).
        """

    @abstractmethod
    def pair_terms(self, diff: np.ndarray, r2: np.ndarray, weights: np.ndarray) -> np.ndarray:
        """
        Contracts the kernel with the source weights for a block of pairs.

        :param diff: x - y, shape (T, S, 3)
        :param r2: |x - y|^2, shape (T, S)
        :param weights: source weights, shape (1, S, weight_dim)
        :return: shape (T, S, output_dim)
        """

    def evaluate(self, x: np.ndarray, y: np.ndarray, f: np.ndarray) -> np.ndarray:
        """
        Evaluates k(x, y) f for a single target x and source y.
        """
        x = np.asarray(x, dtype=np.float64).reshape(1, 3)
        y = np.asarray(y, dtype=np.float64).reshape(1, 3)
        f = np.asarray(f, dtype=np.float64).reshape(1, -1)
        self.check_weights(f)
        if self.self_interaction is SelfInteraction.OMIT and np.array_equal(x, y):
            raise KernelError(f'The `{self.name}` kernel is singular at x = y; the pair ({x[0]}, {y[0]}) is undefined.')
        diff = (x[:, None, :] - y[None, :, :])
        r2 = np.einsum('tsk,tsk->ts', diff, diff)
        return self.pair_terms(diff, r2, f[None, :, :])[0, 0]

    def check_weights(self, weights: np.ndarray) -> None:
        if weights.ndim != 2 or weights.shape[1] != self.weight_dim:
            raise KernelError(
                f'The `{self.name}` kernel expects weights with {self.weight_dim} component(s), '
                f'received an array of shape {weights.shape}.'
            )

    def interact(self, targets: np.ndarray, sources: np.ndarray, weights: np.ndarray) -> np.ndarray:
        """
        Sums the interactions of every target with every source.

        Pairs at zero distance are dropped for kernels that omit the self term. Kernels with a compiled
        form (`kind` set) run through numba in parallel over targets, the rest through `interact_numpy`.

        :param targets: shape (T, 3)
        :param sources: shape (S, 3)
        :param weights: shape (S, weight_dim)
        :return: shape (T, output_dim)
        """
        if targets.shape[0] == 0 or sources.shape[0] == 0:
            return np.zeros((targets.shape[0], self.output_dim))
        self.check_weights(weights)
        if self.kind is None:
            return self.interact_numpy(targets, sources, weights)
        return compiled.pair_sums(
            np.ascontiguousarray(targets, dtype=np.float64),
            np.ascontiguousarray(sources, dtype=np.float64),
            np.ascontiguousarray(weights, dtype=np.float64),
            self.kind,
            self.compiled_epsilon,
            self.self_interaction is SelfInteraction.OMIT,
            self.output_dim,
        )

    def interact_numpy(self, targets: np.ndarray, sources: np.ndarray, weights: np.ndarray) -> np.ndarray:
        """
        Vectorized `interact` over blocks of at most PAIR_CHUNK target-source pairs.
        """
        out = np.zeros((targets.shape[0], self.output_dim))
        if targets.shape[0] == 0 or sources.shape[0] == 0:
            return out
        self.check_weights(weights)
        chunk = max(1, PAIR_CHUNK // targets.shape[0])
        omit = self.self_interaction is SelfInteraction.OMIT
        for start in range(0, sources.shape[0], chunk):
            block = sources[start : start + chunk]
            diff = targets[:, None, :] - block[None, :, :]
            r2 = np.einsum('tsk,tsk->ts', diff, diff)
            with np.errstate(divide='ignore', invalid='ignore'):
                terms = self.pair_terms(diff, r2, weights[None, start : start + chunk, :])
            if omit:
                terms[r2 == 0.0] = 0.0
            out += terms.sum(axis=1)
        return out

    @property
    def compiled_epsilon(self) -> float:
        return float(getattr(self, 'epsilon', 0.0))

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}(name={self.name!r})'
