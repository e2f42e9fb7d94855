import numpy as np
import pytest

from barycentric_treecode.exceptions import KernelError
from barycentric_treecode.kernels import get_kernel
from barycentric_treecode.moments import (
    MIN_WIDTH,
    cluster_grids,
    compute_all_moments,
    compute_modified_weights,
    grid_points,
)
from barycentric_treecode.tree import Cluster, ParticleSystem, build_tree
from tests.types import random_system


def _lagrange_products(points, t):
    """
    Lagrange basis values from the product formula, in extended precision.
    """
    points = points.astype(np.longdouble)
    t = np.asarray(t, dtype=np.longdouble)
    values = np.ones((t.size, points.size), dtype=np.longdouble)
    for k in range(points.size):
        for j in range(points.size):
            if j != k:
                values[:, k] *= (t - points[j]) / (points[k] - points[j])
    return values


def _box_cluster(lo, hi):
    return Cluster(0, 0, np.asarray(lo, dtype=np.float64), np.asarray(hi, dtype=np.float64))


def test_grid_points_order():
    grids = cluster_grids(_box_cluster([0, 0, 0], [1, 2, 3]), 2)
    points = grid_points(grids)
    assert points.shape == (27, 3)
    assert points[0].tolist() == [1.0, 2.0, 3.0]
    assert points[1].tolist() == [1.0, 2.0, 1.5]
    assert points[3].tolist() == [1.0, 1.0, 3.0]
    assert points[9].tolist() == [0.5, 2.0, 3.0]
    assert points[-1].tolist() == [0.0, 0.0, 0.0]


def test_zero_width_sides_are_padded():
    grids = cluster_grids(_box_cluster([0.0, 2.0, -1e6], [1.0, 2.0, -1e6]), 3)
    assert grids[0].a == 0.0 and grids[0].b == 1.0
    assert grids[1].b - grids[1].a == pytest.approx(MIN_WIDTH * 2.0, rel=1e-3)
    assert 0.5 * (grids[1].a + grids[1].b) == pytest.approx(2.0)
    assert grids[2].b - grids[2].a == pytest.approx(MIN_WIDTH * 1e6, rel=1e-3)


def test_partition_of_unity():
    """
    The modified weights of a cluster sum to the sum of its particle weights.
    """
    system = random_system(300, weight_dim=6, seed=31)
    grids = cluster_grids(_box_cluster([0, 0, 0], [1, 1, 1]), 7)
    moments = compute_modified_weights(system.positions, system.weights, grids)
    assert moments.shape == (8, 8, 8, 6)
    scale = np.abs(system.weights).sum(axis=0)
    np.testing.assert_allclose(
        moments.sum(axis=(0, 1, 2)), system.weights.sum(axis=0), rtol=0, atol=1e-13 * scale.max()
    )


def test_matches_brute_force():
    """
    The tensor-product evaluation agrees with an explicit triple sum of Lagrange products.
    """
    rng = np.random.default_rng(32)
    sources = rng.uniform([-1.0, 0.0, 2.0], [1.0, 0.5, 5.0], (40, 3))
    weights = rng.uniform(-1.0, 1.0, (40, 3))
    for degree in [1, 4, 7]:
        grids = cluster_grids(_box_cluster([-1.0, 0.0, 2.0], [1.0, 0.5, 5.0]), degree)
        lx, ly, lz = (_lagrange_products(grids[axis].points, sources[:, axis]) for axis in range(3))
        expected = np.einsum('ja,jb,jc,jm->abcm', lx, ly, lz, weights.astype(np.longdouble))
        moments = compute_modified_weights(sources, weights, grids)
        scale = float(np.abs(expected).max())
        np.testing.assert_allclose(moments, expected.astype(np.float64), rtol=0, atol=1e-12 * scale)


def test_source_on_a_grid_point():
    """
    A source sitting on a grid point puts its whole weight on that point.
    """
    grids = cluster_grids(_box_cluster([0, 0, 0], [1, 1, 1]), 5)
    source = np.array([[grids[0].points[1], grids[1].points[4], grids[2].points[0]]])
    moments = compute_modified_weights(source, np.array([[2.0, -1.0, 0.5]]), grids)
    expected = np.zeros((6, 6, 6, 3))
    expected[1, 4, 0] = [2.0, -1.0, 0.5]
    assert np.array_equal(moments, expected)


def test_compute_all_moments():
    system = random_system(1000, seed=33)
    tree = compute_all_moments(build_tree(system, leaf_size=100), get_kernel('stokeslet', 0.02), degree=5)
    assert tree.degree == 5
    for cluster in tree.clusters():
        assert cluster.moments.shape == (6, 6, 6, 3)
        assert cluster.grid_points.shape == (216, 3)
        weights = tree.system.weights[cluster.lo : cluster.hi]
        np.testing.assert_allclose(cluster.moments.sum(axis=(0, 1, 2)), weights.sum(axis=0), atol=1e-11)


def test_parallel_moments_match_serial():
    system = random_system(2000, seed=34)
    serial = compute_all_moments(build_tree(system, leaf_size=100), None, degree=7)
    parallel = compute_all_moments(build_tree(system, leaf_size=100), None, degree=7, threads=4)
    assert np.array_equal(serial.moments, parallel.moments)
    for first, second in zip(serial.clusters(), parallel.clusters()):
        assert np.array_equal(first.moments, second.moments)
        assert np.array_equal(first.grid_points, second.grid_points)


def test_tree_moments_match_single_cluster_moments():
    """
    The compiled sweep over the tree gives every cluster the moments computed for it alone.
    """
    system = random_system(1500, weight_dim=6, seed=35)
    tree = compute_all_moments(build_tree(system, leaf_size=80), None, degree=6)
    assert tree.moments.shape == (tree.cluster_count, 7 ** 3, 6)
    for index, cluster in enumerate(tree.clusters()):
        weights = tree.system.weights[cluster.lo : cluster.hi]
        expected = compute_modified_weights(tree.system.positions[cluster.lo : cluster.hi], weights, cluster.grids)
        scale = max(np.abs(weights).sum(), 1.0)
        np.testing.assert_allclose(cluster.moments, expected, rtol=0, atol=1e-13 * scale)
        assert np.shares_memory(cluster.moments, tree.moments[index])


def test_zero_weights_give_zero_moments():
    system = ParticleSystem(np.random.default_rng(36).uniform(0, 1, (400, 3)), np.zeros((400, 3)))
    tree = compute_all_moments(build_tree(system, leaf_size=50), None, degree=5)
    assert np.array_equal(tree.moments, np.zeros_like(tree.moments))
    grids = cluster_grids(tree.root, 5)
    assert np.array_equal(compute_modified_weights(system.positions, system.weights, grids), np.zeros((6, 6, 6, 3)))


def test_moments_are_linear_in_the_weights():
    rng = np.random.default_rng(37)
    positions = rng.uniform(-1.0, 2.0, (120, 3))
    f, g = rng.uniform(-1.0, 1.0, (120, 3)), rng.uniform(-1.0, 1.0, (120, 3))
    alpha, beta = 1.7, -0.45
    grids = cluster_grids(_box_cluster([-1.0, -1.0, -1.0], [2.0, 2.0, 2.0]), 6)
    combined = compute_modified_weights(positions, alpha * f + beta * g, grids)
    separate = alpha * compute_modified_weights(positions, f, grids)
    separate += beta * compute_modified_weights(positions, g, grids)
    scale = abs(alpha) * np.abs(f).sum() + abs(beta) * np.abs(g).sum()
    np.testing.assert_allclose(combined, separate, rtol=0, atol=1e-13 * scale)


def test_moments_move_with_the_box():
    """
    Translating the particles and the box together leaves the modified weights unchanged.
    """
    rng = np.random.default_rng(38)
    positions = rng.uniform(0.0, 1.0, (60, 3))
    weights = rng.uniform(-1.0, 1.0, (60, 3))
    shift = np.array([1.5, -2.25, 0.75])
    for degree in [3, 7]:
        unit_box = cluster_grids(_box_cluster([0, 0, 0], [1, 1, 1]), degree)
        original = compute_modified_weights(positions, weights, unit_box)
        grids = cluster_grids(_box_cluster(shift, shift + 1.0), degree)
        moved = compute_modified_weights(positions + shift, weights, grids)
        np.testing.assert_allclose(moved, original, rtol=0, atol=1e-13 * np.abs(weights).sum())


def test_weight_dimension_mismatch():
    tree = build_tree(random_system(50, weight_dim=3), leaf_size=10)
    with pytest.raises(KernelError, match='takes 6 weight component'):
        compute_all_moments(tree, get_kernel('stokeslet-rotlet', 0.3), degree=3)


def test_flat_cluster():
    """
    Particles sharing a coordinate still get well-defined moments.
    """
    positions = np.column_stack([np.linspace(0, 1, 20), np.linspace(0, 1, 20) ** 2, np.zeros(20)])
    tree = compute_all_moments(build_tree(ParticleSystem(positions, np.ones(20)), leaf_size=5), None, degree=4)
    for cluster in tree.clusters():
        assert np.all(np.isfinite(cluster.moments))
        assert cluster.moments.sum() == pytest.approx(cluster.count)
