"""
Particle systems of the two benchmark problems.

Example 1 models a suspension of swimming microorganisms: each organism is a pair of particles
a distance `ell` apart, pushing with unit forces in opposite directions along its axis.
Example 2 models a forest of helical rods standing on a square grid of base points and carries a
random force and torque on every rod point.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from barycentric_treecode.exceptions import ImproperlyConfigured
from barycentric_treecode.tree import ParticleSystem
from barycentric_treecode.utils import validate_epsilon, validate_positive_int

logger = logging.getLogger('barycentric_treecode')

ROD_HEIGHT = 9.0
HELIX_RADIUS = 0.3
HELIX_FREQUENCY = 2.0
# 15 x 15 rods tile [-8, 8]^2; other g keep the same spacing
ROD_SPACING = 16.0 / 15.0


@dataclass(frozen=True)
class Example1Config:
    """
    :param N: number of particles, even
    :param L: side of the cube holding the organism centers
    :param ell: organism length
    :param eps: regularization parameter
    :param seed: random seed
    """

    N: int = 10000
    L: float = 10.0
    ell: float = 0.02
    eps: float = 0.02
    seed: Optional[int] = 1

    def __post_init__(self) -> None:
        validate_positive_int(self.N, 'N')
        if self.N % 2:
            logger.error('Example 1 particle count `%s` is odd.', self.N)
            raise ImproperlyConfigured(f'`N` must be even for example 1, received `{self.N}`.')
        if not self.L > 0:
            raise ImproperlyConfigured(f'Cube side `{self.L}` is invalid. It should be positive.')
        if not self.ell > 0:
            raise ImproperlyConfigured(f'Organism length `{self.ell}` is invalid. It should be positive.')
        validate_epsilon(self.eps)


@dataclass(frozen=True)
class Example2Config:
    """
    :param g: rods per side, so there are g^2 rods
    :param M: segments per rod, so each rod has M + 1 points
    :param h: spacing of the base point grid
    :param eps: regularization parameter
    :param seed: random seed
    """

    g: int = 15
    M: int = 150
    h: float = ROD_SPACING
    eps: float = 0.3
    seed: Optional[int] = 1

    def __post_init__(self) -> None:
        validate_positive_int(self.g, 'g')
        validate_positive_int(self.M, 'M')
        if not self.h > 0:
            raise ImproperlyConfigured(f'Base spacing `{self.h}` is invalid. It should be positive.')
        validate_epsilon(self.eps)

    @property
    def N(self) -> int:
        return self.g * self.g * (self.M + 1)


def random_unit_vectors(rng: np.random.Generator, count: int) -> np.ndarray:
    """
    Directions uniformly distributed on the unit sphere.
    """
    z = rng.uniform(-1.0, 1.0, count)
    phi = rng.uniform(0.0, 2.0 * np.pi, count)
    rho = np.sqrt(1.0 - z * z)
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def gen_example1(cfg: Example1Config) -> ParticleSystem:
    """
    Generates N/2 organisms with centers uniform in [0, L]^3 and uniformly random orientations.

    Particle 2i sits at center + ell/2 * e with force +e, particle 2i+1 at center - ell/2 * e
    with force -e. Organisms near the faces may reach up to ell/2 outside the cube.
    """
    rng = np.random.default_rng(cfg.seed)
    pairs = cfg.N // 2
    centers = rng.uniform(0.0, cfg.L, (pairs, 3))
    orientation = random_unit_vectors(rng, pairs)
    offset = 0.5 * cfg.ell * orientation
    positions = np.empty((cfg.N, 3))
    positions[0::2] = centers + offset
    positions[1::2] = centers - offset
    forces = np.empty((cfg.N, 3))
    forces[0::2] = orientation
    forces[1::2] = -orientation
    logger.debug('Generated example 1 with %s organisms', pairs)
    return ParticleSystem(positions, forces)


def base_points(g: int, h: float = ROD_SPACING) -> np.ndarray:
    """
    Base points of a g x g grid with spacing h, centered at the origin, shape (g^2, 2).
    """
    axis = (np.arange(g) - 0.5 * (g - 1)) * h
    x0, y0 = np.meshgrid(axis, axis, indexing='ij')
    return np.column_stack([x0.ravel(), y0.ravel()])


def gen_example2(cfg: Example2Config) -> ParticleSystem:
    """
    Generates g^2 helical rods (x0 + 0.3 cos 2z, y0 + 0.3 sin 2z, z), z = 9i/M for i = 0..M,
    with every force and torque component uniform in [-1, 1].
    """
    rng = np.random.default_rng(cfg.seed)
    bases = base_points(cfg.g, cfg.h)
    z = ROD_HEIGHT * np.arange(cfg.M + 1) / cfg.M
    x = bases[:, 0:1] + HELIX_RADIUS * np.cos(HELIX_FREQUENCY * z)
    y = bases[:, 1:2] + HELIX_RADIUS * np.sin(HELIX_FREQUENCY * z)
    positions = np.column_stack([x.ravel(), y.ravel(), np.tile(z, bases.shape[0])])
    weights = rng.uniform(-1.0, 1.0, (positions.shape[0], 6))
    logger.debug('Generated example 2 with %s rods of %s points', bases.shape[0], cfg.M + 1)
    return ParticleSystem(positions, weights)
