"""
Modified weights of each cluster.

For a cluster C with Chebyshev grids mapped to its box, the modified weight at grid index
(k1, k2, k3) is sum over y_j in C of L_k1(y_j1) L_k2(y_j2) L_k3(y_j3) f_j. A target far from C
then interacts with the (n+1)^3 grid points carrying these weights instead of with the particles.
"""
import logging
import math
from typing import Optional, Tuple

import numpy as np
from numba import njit, prange

from barycentric_treecode.chebyshev import DBL_MIN, ChebyshevGrid1D, basis_matrix, map_grid, simple_weights
from barycentric_treecode.exceptions import KernelError
from barycentric_treecode.kernels import Kernel
from barycentric_treecode.tree import Cluster, ClusterTree
from barycentric_treecode.utils import thread_limit

logger = logging.getLogger('barycentric_treecode')

Grids = Tuple[ChebyshevGrid1D, ChebyshevGrid1D, ChebyshevGrid1D]

MIN_WIDTH = 1e-12


def cluster_grids(cluster: Cluster, degree: int) -> Grids:
    """
    Maps a Chebyshev grid onto each side of the cluster box.

    A side of zero width (all particles share that coordinate) is widened symmetrically to
    max(1e-12, 1e-12 * |coordinate|) so the grid nodes stay distinct.
    """
    grids = []
    for axis in range(3):
        a, b = float(cluster.box_min[axis]), float(cluster.box_max[axis])
        if not a < b:
            half = 0.5 * max(MIN_WIDTH, MIN_WIDTH * abs(a))
            a, b = a - half, a + half
        grids.append(map_grid(degree, a, b))
    return grids[0], grids[1], grids[2]


def grid_points(grids: Grids) -> np.ndarray:
    """
    Tensor-product grid points, shape ((n+1)^3, 3), with index (k1, k2, k3) flattened in C order.
    """
    mesh = np.meshgrid(grids[0].points, grids[1].points, grids[2].points, indexing='ij')
    return np.stack(mesh, axis=-1).reshape(-1, 3)


def compute_modified_weights(sources: np.ndarray, weights: np.ndarray, grids: Grids) -> np.ndarray:
    """
    Computes the modified weights of one cluster.

    :param sources: the cluster's particle positions, shape (Nc, 3)
    :param weights: the cluster's particle weights, shape (Nc, m)
    :param grids: Chebyshev grids spanning the cluster box along x, y and z
    :return: array of shape (n+1, n+1, n+1, m)
    """
    count, dim = weights.shape
    size = grids[0].degree + 1
    lx, ly, lz = (basis_matrix(grids[axis], sources[:, axis]) for axis in range(3))
    xy = (lx[:, :, None] * ly[:, None, :]).reshape(count, size * size)
    zf = (lz[:, :, None] * weights[:, None, :]).reshape(count, size * dim)
    return (xy.T @ zf).reshape(size, size, size, dim)


@njit(cache=True)
def _basis_row(nodes, bary, t, row):  # pragma: no cover
    """
    Writes [L_0(t), ..., L_n(t)] into `row`, with the same node handling as `basis_matrix`.
    """
    hit = -1
    total = 0.0
    for k in range(nodes.shape[0]):
        d = t - nodes[k]
        if abs(d) <= DBL_MIN:
            hit = k
            break
        term = bary[k] / d
        if not math.isfinite(term):
            hit = k
            break
        row[k] = term
        total += term
    if hit >= 0:
        for k in range(nodes.shape[0]):
            row[k] = 0.0
        row[hit] = 1.0
        return
    for k in range(nodes.shape[0]):
        row[k] /= total


@njit(parallel=True, cache=True)
def _accumulate_moments(positions, weights, lo, hi, nodes, bary, out):  # pragma: no cover
    # one task per (slab a, cluster c); it owns out[c, a * size**2 : (a + 1) * size**2]
    clusters = lo.shape[0]
    size = bary.shape[0]
    dim = weights.shape[1]
    for task in prange(clusters * size):
        a = task // clusters
        c = task - a * clusters
        lx = np.empty(size)
        ly = np.empty(size)
        lz = np.empty(size)
        for j in range(lo[c], hi[c]):
            _basis_row(nodes[c, 0], bary, positions[j, 0], lx)
            _basis_row(nodes[c, 1], bary, positions[j, 1], ly)
            _basis_row(nodes[c, 2], bary, positions[j, 2], lz)
            for b in range(size):
                xy = lx[a] * ly[b]
                base = (a * size + b) * size
                for g in range(size):
                    w = xy * lz[g]
                    for k in range(dim):
                        out[c, base + g, k] += w * weights[j, k]


def compute_all_moments(tree: ClusterTree, kernel: Optional[Kernel], degree: int, threads: int = 1) -> ClusterTree:
    """
    Computes grids and modified weights for every cluster of the tree, leaves included.

    The sums run compiled, in parallel over (cluster, first grid index) pairs. Every entry is
    accumulated by one task in particle order, so the result does not depend on `threads`.

    :param tree: built cluster tree
    :param kernel: kernel the weights will be used with; checked against the weight dimension
    :param degree: interpolation degree n
    :param threads: number of numba threads
    :return: the same tree, with moments attached
    """
    if kernel is not None and kernel.weight_dim != tree.system.weight_dim:
        raise KernelError(
            f'The `{kernel.name}` kernel takes {kernel.weight_dim} weight component(s), '
            f'but the particles carry {tree.system.weight_dim}.'
        )
    logger.debug('Computing modified weights of degree %s for %s clusters', degree, tree.cluster_count)
    clusters = list(tree.clusters())
    size = degree + 1
    nodes = np.empty((len(clusters), 3, size))
    points = np.empty((len(clusters), size ** 3, 3))
    for i, cluster in enumerate(clusters):
        cluster.grids = cluster_grids(cluster, degree)
        nodes[i] = [grid.points for grid in cluster.grids]
        points[i] = grid_points(cluster.grids)
    moments = np.zeros((len(clusters), size ** 3, tree.system.weight_dim))
    arrays = tree.arrays
    with thread_limit(threads):
        _accumulate_moments(
            tree.system.positions, tree.system.weights, arrays.lo, arrays.hi, nodes, simple_weights(degree), moments
        )
    for i, cluster in enumerate(clusters):
        cluster.grid_points = points[i]
        cluster.moments = moments[i].reshape(size, size, size, -1)
    tree.grid_points = points
    tree.moments = moments
    tree.degree = degree
    return tree
