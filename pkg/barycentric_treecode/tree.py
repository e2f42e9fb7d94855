"""
Hierarchy of rectangular particle clusters.

A cluster is bisected at its midpoint in every direction whose side exceeds l_max / sqrt(2),
l_max being the cluster's own longest side, so it has 8, 4 or 2 children. Clusters holding at
most N0 particles are leaves. Particles are reordered so every cluster owns a contiguous range.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np

from barycentric_treecode.exceptions import TreeError

logger = logging.getLogger('barycentric_treecode')

MAX_DEPTH = 64
SQRT2 = np.sqrt(2.0)


@dataclass
class ParticleSystem:
    """
    Particle positions with one weight vector per particle.

    `permutation[i]` is the original index of the particle stored at position i.
    """

    positions: np.ndarray
    weights: np.ndarray
    permutation: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        self.positions = np.ascontiguousarray(self.positions, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        if weights.ndim == 1:
            weights = weights[:, None]
        self.weights = np.ascontiguousarray(weights)
        if self.positions.ndim != 2 or self.positions.shape[1] != 3:
            raise TreeError(f'Positions should have shape (N, 3), received {self.positions.shape}.')
        if self.weights.shape[0] != self.positions.shape[0]:
            raise TreeError(
                f'Received {self.positions.shape[0]} positions but {self.weights.shape[0]} weight vectors.'
            )
        if not np.all(np.isfinite(self.positions)):
            raise TreeError('Particle positions must be finite.')
        if self.permutation is None:
            self.permutation = np.arange(self.positions.shape[0])

    @property
    def size(self) -> int:
        return int(self.positions.shape[0])

    @property
    def weight_dim(self) -> int:
        return int(self.weights.shape[1])

    def reordered(self, order: np.ndarray) -> 'ParticleSystem':
        """
        Returns the system with particles taken in `order`, composing the recorded permutation.
        """
        return ParticleSystem(self.positions[order], self.weights[order], self.permutation[order])  # type: ignore


def cluster_radius(box_min: np.ndarray, box_max: np.ndarray) -> float:
    """
    Length of the half-diagonal of an axis-aligned box.
    """
    half = 0.5 * (np.asarray(box_max, dtype=np.float64) - np.asarray(box_min, dtype=np.float64))
    return float(np.sqrt(half @ half))


@dataclass(eq=False)
class Cluster:
    """
    A rectangular box owning the particles [lo, hi) of the tree-ordered system.

    `grids`, `grid_points` and `moments` are filled in by the moments module.
    """

    lo: int
    hi: int
    box_min: np.ndarray
    box_max: np.ndarray
    level: int = 0
    children: List['Cluster'] = field(default_factory=list)
    grids: Optional[Tuple[Any, Any, Any]] = None
    grid_points: Optional[np.ndarray] = None
    moments: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        self.center = 0.5 * (self.box_min + self.box_max)
        self.radius = cluster_radius(self.box_min, self.box_max)

    @property
    def count(self) -> int:
        return self.hi - self.lo

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class TreeArrays:
    """
    Flat pre-order copy of the hierarchy for the compiled traversal.

    Cluster c has children `children[child_start[c] : child_start[c] + child_count[c]]`.
    """

    lo: np.ndarray
    hi: np.ndarray
    center: np.ndarray
    radius: np.ndarray
    child_start: np.ndarray
    child_count: np.ndarray
    children: np.ndarray

    @classmethod
    def from_clusters(cls, clusters: List[Cluster]) -> 'TreeArrays':
        index = {id(cluster): i for i, cluster in enumerate(clusters)}
        child_count = np.array([len(cluster.children) for cluster in clusters], dtype=np.int64)
        child_start = np.zeros(len(clusters), dtype=np.int64)
        np.cumsum(child_count[:-1], out=child_start[1:])
        children = np.array(
            [index[id(child)] for cluster in clusters for child in cluster.children], dtype=np.int64
        )
        return cls(
            lo=np.array([cluster.lo for cluster in clusters], dtype=np.int64),
            hi=np.array([cluster.hi for cluster in clusters], dtype=np.int64),
            center=np.array([cluster.center for cluster in clusters], dtype=np.float64).reshape(-1, 3),
            radius=np.array([cluster.radius for cluster in clusters], dtype=np.float64),
            child_start=child_start,
            child_count=child_count,
            children=children,
        )


class ClusterTree:
    """
    The cluster hierarchy together with the tree-ordered particle system it was built from.
    """

    def __init__(self, root: Cluster, system: ParticleSystem, leaf_size: int, shrink: bool) -> None:
        self.root = root
        self.system = system
        self.leaf_size = leaf_size
        self.shrink = shrink
        self.oversized_leaves = 0
        self.depth = 0
        self.cluster_count = 0
        self.degree: Optional[int] = None
        self._arrays: Optional[TreeArrays] = None
        # stacked per-cluster grid points and modified weights, in the pre-order of `arrays`
        self.grid_points: Optional[np.ndarray] = None
        self.moments: Optional[np.ndarray] = None

    @property
    def permutation(self) -> np.ndarray:
        return self.system.permutation  # type: ignore

    def clusters(self) -> Iterator[Cluster]:
        """
        Yields every cluster in depth-first pre-order.
        """
        stack = [self.root]
        while stack:
            cluster = stack.pop()
            yield cluster
            stack.extend(reversed(cluster.children))

    def leaves(self) -> Iterator[Cluster]:
        return (cluster for cluster in self.clusters() if cluster.is_leaf)

    @property
    def arrays(self) -> TreeArrays:
        if self._arrays is None:
            self._arrays = TreeArrays.from_clusters(list(self.clusters()))
        return self._arrays

    def statistics(self) -> Dict[str, Any]:
        """
        Depth, cluster and leaf counts, and the leaf size distribution.
        """
        sizes = np.array([leaf.count for leaf in self.leaves()])
        edges = [0, 1, 10, 100, 1000, 10000, np.inf]
        histogram, _ = np.histogram(sizes, bins=edges)
        return {
            'depth': self.depth,
            'cluster_count': self.cluster_count,
            'leaf_count': int(sizes.size),
            'leaf_size_min': int(sizes.min()),
            'leaf_size_max': int(sizes.max()),
            'leaf_size_mean': float(sizes.mean()),
            'leaf_size_histogram': {
                f'{int(lo)}-{hi if np.isinf(hi) else int(hi) - 1}': int(c)
                for lo, hi, c in zip(edges[:-1], edges[1:], histogram)
            },
            'oversized_leaves': self.oversized_leaves,
        }


def _bounding_box(positions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return positions.min(axis=0), positions.max(axis=0)


def build_tree(system: ParticleSystem, leaf_size: int, shrink: bool = False) -> ClusterTree:
    """
    Builds the cluster tree and reorders the particles into contiguous cluster ranges.

    :param system: particle system in input order
    :param leaf_size: N0, the maximum number of particles in a leaf
    :param shrink: tighten each child box to the bounding box of its particles
    :return: the tree; `tree.system` holds the reordered particles
    :raises: barycentric_treecode.exceptions.TreeError
    """
    if system.size < 1:
        raise TreeError('Cannot build a cluster tree without particles.')
    if isinstance(leaf_size, bool) or not isinstance(leaf_size, (int, np.integer)) or leaf_size < 1:
        raise TreeError(f'Leaf size `{leaf_size}` is invalid. It should be a positive integer.')

    logger.debug('Building cluster tree for %s particles with N0=%s', system.size, leaf_size)
    positions = system.positions
    order = np.arange(system.size)
    box_min, box_max = _bounding_box(positions)
    root = Cluster(0, system.size, box_min, box_max)
    tree = ClusterTree(root, system, int(leaf_size), shrink)

    stack = [root]
    while stack:
        cluster = stack.pop()
        tree.cluster_count += 1
        tree.depth = max(tree.depth, cluster.level)
        if cluster.count <= leaf_size:
            continue
        sides = cluster.box_max - cluster.box_min
        l_max = sides.max()
        if l_max == 0.0 or cluster.level >= MAX_DEPTH:
            tree.oversized_leaves += 1
            logger.warning(
                'Cluster at level %s keeps %s particles (> N0=%s): its particles cannot be separated.',
                cluster.level,
                cluster.count,
                leaf_size,
            )
            continue

        axes = np.flatnonzero(sides > l_max / SQRT2)
        mid = cluster.center
        segment = order[cluster.lo : cluster.hi]
        points = positions[segment]
        codes = np.zeros(segment.size, dtype=np.int64)
        for bit, axis in enumerate(axes):
            codes |= (points[:, axis] > mid[axis]).astype(np.int64) << bit
        ranking = np.argsort(codes, kind='stable')
        order[cluster.lo : cluster.hi] = segment[ranking]
        counts = np.bincount(codes, minlength=1 << axes.size)

        start = cluster.lo
        for code, count in enumerate(counts):
            if count == 0:
                continue
            child_min = cluster.box_min.copy()
            child_max = cluster.box_max.copy()
            for bit, axis in enumerate(axes):
                if code >> bit & 1:
                    child_min[axis] = mid[axis]
                else:
                    child_max[axis] = mid[axis]
            if shrink:
                child_min, child_max = _bounding_box(positions[order[start : start + count]])
            cluster.children.append(Cluster(start, start + int(count), child_min, child_max, cluster.level + 1))
            start += int(count)
        stack.extend(reversed(cluster.children))

    tree.system = system.reordered(order)
    logger.debug('Built %s clusters, depth %s', tree.cluster_count, tree.depth)
    return tree


def count_moment_storage(tree: ClusterTree, degree: int) -> int:
    """
    Number of modified-weight scalars the tree stores at degree n: (n+1)^3 * m per cluster.
    """
    per_cluster = (degree + 1) ** 3 * tree.system.weight_dim
    return tree.cluster_count * per_cluster
