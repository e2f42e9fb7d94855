"""
Treecode evaluation and the direct-sum reference.

Every target walks the tree depth first. A cluster satisfying the multipole acceptance criterion
contributes its far-field approximation, a rejected leaf its direct interaction, and a rejected
inner cluster the contributions of its children. For the built-in kernels the walk is compiled
with numba and runs in parallel over targets. A target's terms are always summed on one thread in
the same order, so outputs are identical for any thread count.
"""
import logging
import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from numba import njit, prange

from barycentric_treecode.configuration import settings
from barycentric_treecode.exceptions import TreecodeError
from barycentric_treecode.kernels import CoulombKernel, Kernel, SelfInteraction, StokesletKernel, StokesletRotletKernel
from barycentric_treecode.kernels.compiled import accumulate
from barycentric_treecode.moments import compute_all_moments
from barycentric_treecode.tree import MAX_DEPTH, Cluster, ClusterTree, ParticleSystem, build_tree
from barycentric_treecode.utils import (
    target_blocks,
    thread_limit,
    validate_degree,
    validate_leaf_size,
    validate_positive_int,
    validate_theta,
)

logger = logging.getLogger('barycentric_treecode')

# a popped cluster pushes at most 8 children, one level deeper
STACK_SIZE = 8 * (MAX_DEPTH + 1)


@dataclass(frozen=True)
class TreecodeParams:
    """
    The three user parameters of the treecode.

    :param theta: MAC parameter in (0, 1]
    :param degree: interpolation degree n
    :param leaf_size: N0, the maximum number of particles in a leaf
    """

    theta: float = 0.7
    degree: int = 7
    leaf_size: int = 2000

    def __post_init__(self) -> None:
        validate_theta(self.theta)
        validate_degree(self.degree)
        validate_leaf_size(self.leaf_size)


@dataclass
class InteractionStats:
    """
    Counts gathered during a traversal.

    `approximations` and `direct_sums` count target-cluster pairs, `kernel_evals` counts
    point-pair kernel evaluations.
    """

    approximations: int = 0
    direct_sums: int = 0
    kernel_evals: int = 0

    def merge(self, other: 'InteractionStats') -> 'InteractionStats':
        self.approximations += other.approximations
        self.direct_sums += other.direct_sums
        self.kernel_evals += other.kernel_evals
        return self

    def as_dict(self) -> Dict[str, int]:
        return asdict(self)


def _distances(targets: np.ndarray, cluster: Cluster) -> np.ndarray:
    delta = targets - cluster.center
    return np.sqrt(np.einsum('ij,ij->i', delta, delta))


def mac_accept(target: np.ndarray, cluster: Cluster, theta: float) -> bool:
    """
    Multipole acceptance criterion r <= theta * R, R being the distance from target to cluster center.

    A target at the center of a cluster (R = 0) is accepted only by a cluster of zero radius.
    """
    distance = float(_distances(np.asarray(target, dtype=np.float64).reshape(1, 3), cluster)[0])
    return bool(cluster.radius <= theta * distance)


def _targets_2d(targets: np.ndarray) -> Tuple[np.ndarray, bool]:
    targets = np.asarray(targets, dtype=np.float64)
    return targets.reshape(-1, 3), targets.ndim == 1


def approx_interaction(targets: np.ndarray, cluster: Cluster, kernel: Kernel) -> np.ndarray:
    """
    Far-field approximation: the targets interact with the cluster's grid points carrying the modified weights.

    :param targets: a single point (3,) or a block (T, 3)
    :return: output vector (p,) or block (T, p)
    :raises: barycentric_treecode.exceptions.TreecodeError if the cluster has no moments
    """
    if cluster.moments is None or cluster.grid_points is None:
        raise TreecodeError('The cluster has no modified weights. Run `compute_all_moments` first.')
    block, single = _targets_2d(targets)
    weights = cluster.moments.reshape(-1, cluster.moments.shape[-1])
    out = kernel.interact(block, cluster.grid_points, weights)
    return out[0] if single else out


def direct_interaction(targets: np.ndarray, cluster: Cluster, kernel: Kernel, system: ParticleSystem) -> np.ndarray:
    """
    Sums the kernel over the particles of the cluster, honoring the kernel's self-interaction policy.

    :param system: the tree-ordered particle system the cluster's range refers to
    """
    block, single = _targets_2d(targets)
    sources = system.positions[cluster.lo : cluster.hi]
    weights = system.weights[cluster.lo : cluster.hi]
    out = kernel.interact(block, sources, weights)
    return out[0] if single else out


def _walk(
    targets: np.ndarray,
    cluster: Cluster,
    theta: float,
    grid_size: int,
    stats: InteractionStats,
    far_field: Optional[Callable[[np.ndarray, Cluster], None]] = None,
    near_field: Optional[Callable[[np.ndarray, Cluster], None]] = None,
) -> None:
    """
    Walks the tree below `cluster` for a block of targets, calling back with the target indices
    assigned to each far-field and near-field interaction.
    """
    stack: List[Tuple[Cluster, np.ndarray]] = [(cluster, np.arange(targets.shape[0]))]
    while stack:
        node, idx = stack.pop()
        distance = _distances(targets[idx], node)
        accepted = node.radius <= theta * distance
        # a target sitting on a zero-radius cluster is not far from it
        far = accepted & (distance > 0.0)
        if far.any():
            far_idx = idx[far]
            stats.approximations += far_idx.size
            stats.kernel_evals += far_idx.size * grid_size
            if far_field is not None:
                far_field(far_idx, node)
        near_idx = idx[~far]
        if near_idx.size == 0:
            continue
        if node.is_leaf:
            stats.direct_sums += near_idx.size
            stats.kernel_evals += near_idx.size * node.count
            if near_field is not None:
                near_field(near_idx, node)
        else:
            stack.extend((child, near_idx) for child in reversed(node.children))


def compute_velocity(
    targets: np.ndarray,
    cluster: Cluster,
    params: TreecodeParams,
    kernel: Kernel,
    system: ParticleSystem,
    stats: Optional[InteractionStats] = None,
) -> np.ndarray:
    """
    Treecode sum over the particles of `cluster` for one target (3,) or a block of targets (T, 3).

    Accepted clusters contribute their far-field approximation, rejected leaves their direct
    interaction, and rejected inner clusters the contributions of their children.
    """
    block, single = _targets_2d(targets)
    out = np.zeros((block.shape[0], kernel.output_dim))
    stats = stats if stats is not None else InteractionStats()

    def far_field(idx: np.ndarray, node: Cluster) -> None:
        out[idx] += approx_interaction(block[idx], node, kernel)

    def near_field(idx: np.ndarray, node: Cluster) -> None:
        out[idx] += direct_interaction(block[idx], node, kernel, system)

    grid_size = (params.degree + 1) ** 3
    _walk(block, cluster, params.theta, grid_size, stats, far_field, near_field)
    return out[0] if single else out


@njit(parallel=True, cache=True)
def _traverse(
    targets,
    positions,
    weights,
    lo,
    hi,
    center,
    radius,
    child_start,
    child_count,
    children,
    grid_points,
    moments,
    grid_size,
    theta,
    kind,
    eps,
    omit,
    evaluate,
    out,
    counts,
):  # pragma: no cover
    # each target walks the tree alone, depth first, on its own stack
    for t in prange(targets.shape[0]):
        tx = targets[t, 0]
        ty = targets[t, 1]
        tz = targets[t, 2]
        stack = np.empty(STACK_SIZE, np.int64)
        stack[0] = 0
        top = 1
        approximations = 0
        direct_sums = 0
        kernel_evals = 0
        while top > 0:
            top -= 1
            c = stack[top]
            dx = tx - center[c, 0]
            dy = ty - center[c, 1]
            dz = tz - center[c, 2]
            distance = math.sqrt(dx * dx + dy * dy + dz * dz)
            if radius[c] <= theta * distance and distance > 0.0:
                approximations += 1
                kernel_evals += grid_size
                if evaluate:
                    accumulate(kind, eps, omit, tx, ty, tz, grid_points[c], moments[c], 0, grid_size, out[t])
            elif child_count[c] == 0:
                direct_sums += 1
                kernel_evals += hi[c] - lo[c]
                if evaluate:
                    accumulate(kind, eps, omit, tx, ty, tz, positions, weights, lo[c], hi[c], out[t])
            else:
                for i in range(child_count[c] - 1, -1, -1):
                    stack[top] = children[child_start[c] + i]
                    top += 1
        counts[t, 0] = approximations
        counts[t, 1] = direct_sums
        counts[t, 2] = kernel_evals


def _run_traversal(
    tree: ClusterTree,
    points: np.ndarray,
    params: TreecodeParams,
    kernel: Optional[Kernel],
    threads: int,
) -> Tuple[np.ndarray, InteractionStats]:
    arrays = tree.arrays
    evaluate = kernel is not None
    if kernel is not None:
        grid_points, moments = tree.grid_points, tree.moments
        kind, eps, omit = kernel.kind, kernel.compiled_epsilon, kernel.self_interaction is SelfInteraction.OMIT
        output_dim = kernel.output_dim
    else:
        grid_points, moments = np.zeros((1, 1, 3)), np.zeros((1, 1, tree.system.weight_dim))
        kind, eps, omit, output_dim = 0, 0.0, False, 1
    out = np.zeros((points.shape[0], output_dim))
    counts = np.zeros((points.shape[0], 3), dtype=np.int64)
    with thread_limit(threads):
        _traverse(
            points,
            tree.system.positions,
            tree.system.weights,
            arrays.lo,
            arrays.hi,
            arrays.center,
            arrays.radius,
            arrays.child_start,
            arrays.child_count,
            arrays.children,
            grid_points,
            moments,
            (params.degree + 1) ** 3,
            float(params.theta),
            kind,
            eps,
            omit,
            evaluate,
            out,
            counts,
        )
    approximations, direct_sums, kernel_evals = (int(total) for total in counts.sum(axis=0))
    return out, InteractionStats(approximations, direct_sums, kernel_evals)


def _walk_blocks(
    tree: ClusterTree, points: np.ndarray, params: TreecodeParams, kernel: Kernel, block_size: int
) -> Tuple[np.ndarray, InteractionStats]:
    validate_positive_int(block_size, 'block_size')
    out = np.zeros((points.shape[0], kernel.output_dim))
    stats = InteractionStats()
    for start, stop in target_blocks(points.shape[0], block_size):
        out[start:stop] = compute_velocity(points[start:stop], tree.root, params, kernel, tree.system, stats)
    return out, stats


def _target_points(system: ParticleSystem, targets: Optional[np.ndarray]) -> np.ndarray:
    if targets is None:
        return system.positions
    return np.ascontiguousarray(np.asarray(targets, dtype=np.float64).reshape(-1, 3))


def evaluate_all(
    tree: ClusterTree,
    params: TreecodeParams,
    kernel: Kernel,
    threads: int = 1,
    targets: Optional[np.ndarray] = None,
    block_size: Optional[int] = None,
) -> Tuple[np.ndarray, InteractionStats]:
    """
    Runs the treecode for every target.

    Built-in kernels run the compiled traversal in parallel over targets. Kernels without a
    compiled form are walked with numpy in blocks of `block_size` targets on the calling thread.

    :param tree: cluster tree with modified weights of degree `params.degree`
    :param params: treecode parameters
    :param kernel: the kernel the moments were computed for
    :param threads: number of numba threads
    :param targets: optional independent targets (T, 3); defaults to the source particles
    :param block_size: targets per numpy block, defaults to settings.BLOCK_SIZE
    :return: outputs in the original particle order (or the given target order) and the interaction counts
    :raises: barycentric_treecode.exceptions.TreecodeError
    """
    if tree.degree is None:
        raise TreecodeError('The tree has no modified weights. Run `compute_all_moments` first.')
    if tree.degree != params.degree:
        raise TreecodeError(
            f'Moments were computed with degree {tree.degree}, but the treecode runs with degree {params.degree}.'
        )
    validate_positive_int(threads, 'threads')
    kernel.check_weights(tree.system.weights)
    own_particles = targets is None
    points = _target_points(tree.system, targets)
    logger.debug(
        'Evaluating %s targets with theta=%s, n=%s, N0=%s on %s thread(s)',
        points.shape[0],
        params.theta,
        params.degree,
        params.leaf_size,
        threads,
    )
    if kernel.kind is None:
        out, stats = _walk_blocks(tree, points, params, kernel, block_size or settings.BLOCK_SIZE)
    else:
        out, stats = _run_traversal(tree, points, params, kernel, threads)
    logger.debug('Traversal finished: %s', stats.as_dict())
    if not own_particles:
        return out, stats
    result = np.empty_like(out)
    result[tree.permutation] = out
    return result, stats


def direct_sum(
    system: ParticleSystem,
    kernel: Kernel,
    threads: int = 1,
    targets: Optional[np.ndarray] = None,
    block_size: Optional[int] = None,
) -> np.ndarray:
    """
    Exact O(N^2) sum of the kernel over all particles, for every target.

    :param targets: optional targets (T, 3); defaults to the particle positions, in system order
    :param block_size: targets per numpy block for kernels without a compiled form
    :return: array of shape (T, p)
    """
    validate_positive_int(threads, 'threads')
    points = _target_points(system, targets)
    logger.debug('Direct sum of %s sources for %s targets', system.size, points.shape[0])
    if kernel.kind is not None:
        with thread_limit(threads):
            return kernel.interact(points, system.positions, system.weights)
    block_size = validate_positive_int(block_size or settings.BLOCK_SIZE, 'block_size')
    out = np.zeros((points.shape[0], kernel.output_dim))
    for start, stop in target_blocks(points.shape[0], block_size):
        out[start:stop] = kernel.interact(points[start:stop], system.positions, system.weights)
    return out


def count_interactions(
    tree: ClusterTree, params: TreecodeParams, targets: Optional[np.ndarray] = None, threads: int = 1
) -> InteractionStats:
    """
    Walks the tree like `evaluate_all` without evaluating any kernel and returns the counts a full run would report.

    Moments are not needed.
    """
    points = _target_points(tree.system, targets)
    _, stats = _run_traversal(tree, points, params, None, threads)
    return stats


@lru_cache(maxsize=None)
def warm_up() -> None:
    """
    Compiles the parallel loops on a handful of particles so timed runs do not include compilation.

    Runs once per process; numba caches the machine code on disk for later processes.
    """
    rng = np.random.default_rng(0)
    positions = rng.random((16, 3))
    params = TreecodeParams(theta=0.7, degree=1, leaf_size=2)
    for kernel in (StokesletKernel(0.1), StokesletRotletKernel(0.1), CoulombKernel()):
        system = ParticleSystem(positions, rng.random((16, kernel.weight_dim)))
        tree = compute_all_moments(build_tree(system, params.leaf_size), kernel, params.degree)
        evaluate_all(tree, params, kernel)
        evaluate_all(tree, params, kernel, targets=positions[:2] + 2.0)
        direct_sum(system, kernel)
        count_interactions(tree, params)
    logger.debug('Compiled the traversal, moment and direct-sum loops')
