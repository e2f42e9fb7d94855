"""
Plain-text particle and output files.

A particle file starts with the line `N m` followed by N rows `x y z w_1 .. w_m`.
An output file starts with `N p` followed by N rows of p values.
Values are written with 17 significant digits, so a file reads back to the same doubles.
"""
import logging
from typing import Tuple

import numpy as np

from barycentric_treecode.exceptions import ExperimentError
from barycentric_treecode.tree import ParticleSystem

logger = logging.getLogger('barycentric_treecode')

FORMAT = '%.17g'


def _write_table(path: str, table: np.ndarray, columns: int) -> None:
    header = f'{table.shape[0]} {columns}'
    np.savetxt(path, table, fmt=FORMAT, header=header, comments='')


def _read_table(path: str, extra: int) -> Tuple[np.ndarray, int]:
    try:
        with open(path, 'r') as f:
            header = f.readline().split()
            count, columns = int(header[0]), int(header[1])
            table = np.loadtxt(f, dtype=np.float64, ndmin=2)
    except (IndexError, ValueError) as e:
        logger.error('Could not parse %s', path)
        raise ExperimentError(f'The file `{path}` is not a valid table. Error: {e}')
    if count == 0:
        table = np.zeros((0, columns + extra))
    if table.shape != (count, columns + extra):
        raise ExperimentError(
            f'The file `{path}` announces {count} rows of {columns + extra} values, '
            f'but holds an array of shape {table.shape}.'
        )
    return table, columns


def write_particles(system: ParticleSystem, path: str) -> None:
    """
    Writes the particles in their current order.
    """
    logger.debug('Writing %s particles to %s', system.size, path)
    _write_table(path, np.hstack([system.positions, system.weights]), system.weight_dim)


def read_particles(path: str) -> ParticleSystem:
    """
    :raises: barycentric_treecode.exceptions.ExperimentError
    """
    table, weight_dim = _read_table(path, extra=3)
    logger.debug('Read %s particles with %s weight component(s) from %s', table.shape[0], weight_dim, path)
    return ParticleSystem(table[:, :3], table[:, 3:])


def write_outputs(values: np.ndarray, path: str) -> None:
    values = np.asarray(values, dtype=np.float64)
    values = values.reshape(values.shape[0], -1)
    _write_table(path, values, values.shape[1])


def read_outputs(path: str) -> np.ndarray:
    table, _ = _read_table(path, extra=0)
    return table
