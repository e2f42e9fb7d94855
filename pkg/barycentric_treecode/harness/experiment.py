"""
Runs the treecode against a direct-sum reference and reports error and timings.
"""
import logging
import time
from typing import Optional, Tuple, Union

import numpy as np

from barycentric_treecode.configuration import settings
from barycentric_treecode.engine import TreecodeParams, direct_sum, evaluate_all, warm_up
from barycentric_treecode.exceptions import ExperimentError
from barycentric_treecode.harness.generators import Example1Config, Example2Config, gen_example1, gen_example2
from barycentric_treecode.harness.report import RunReport
from barycentric_treecode.kernels import Kernel, get_kernel
from barycentric_treecode.moments import compute_all_moments
from barycentric_treecode.tree import ParticleSystem, build_tree, count_moment_storage

logger = logging.getLogger('barycentric_treecode')

ExampleConfig = Union[Example1Config, Example2Config]


def relative_error(reference: np.ndarray, approx: np.ndarray) -> float:
    """
    E = sqrt(sum_i |u_i - v_i|^2 / sum_i |u_i|^2) over per-particle output vectors.

    All output components of a particle form one vector, so linear and angular velocities are
    measured together.

    :raises: barycentric_treecode.exceptions.ExperimentError
    """
    reference = np.asarray(reference, dtype=np.float64)
    approx = np.asarray(approx, dtype=np.float64)
    if reference.shape != approx.shape:
        raise ExperimentError(f'Cannot compare outputs of shape {reference.shape} and {approx.shape}.')
    norm = float(np.sum(reference * reference))
    if norm == 0.0:
        raise ExperimentError('The reference is identically zero; the relative error is undefined.')
    diff = reference - approx
    return float(np.sqrt(np.sum(diff * diff) / norm))


def default_kernel(example: int, eps: float) -> Kernel:
    return get_kernel('stokeslet' if example == 1 else 'stokeslet-rotlet', eps)


class Experiment:
    """
    A particle system, its kernel and a lazily computed direct-sum reference.

    The reference is computed once and shared by every `run`. When N exceeds the direct-sum budget
    it covers a uniform random sample of targets only, and its time is extrapolated to all N targets.
    """

    def __init__(
        self,
        system: ParticleSystem,
        kernel: Kernel,
        example: int = 0,
        seed: Optional[int] = None,
        direct_budget: Optional[int] = None,
        sample_size: Optional[int] = None,
    ) -> None:
        if kernel.weight_dim != system.weight_dim:
            raise ExperimentError(
                f'The `{kernel.name}` kernel takes {kernel.weight_dim} weight component(s), '
                f'but the particles carry {system.weight_dim}.'
            )
        self.system = system
        self.kernel = kernel
        self.example = example
        self.seed = seed
        self.direct_budget = direct_budget or settings.DIRECT_BUDGET
        self.sample_size = sample_size or settings.ERROR_SAMPLE_SIZE
        self.sample: Optional[np.ndarray] = None
        self.reference: Optional[np.ndarray] = None
        self.t_direct_s = 0.0
        self.outputs: Optional[np.ndarray] = None

    @classmethod
    def from_config(cls, config: ExampleConfig, kernel: Optional[Kernel] = None, **kwargs) -> 'Experiment':
        if isinstance(config, Example1Config):
            example, system = 1, gen_example1(config)
        elif isinstance(config, Example2Config):
            example, system = 2, gen_example2(config)
        else:
            raise ExperimentError(f'Unknown example configuration {config!r}.')
        kernel = kernel or default_kernel(example, config.eps)
        return cls(system, kernel, example=example, seed=config.seed, **kwargs)

    @property
    def sampled(self) -> bool:
        return self.system.size > self.direct_budget

    def compute_reference(self, threads: int = 1) -> Tuple[Optional[np.ndarray], np.ndarray]:
        """
        Returns the sampled target indices (None when all targets are used) and the reference outputs.
        """
        if self.reference is not None:
            return self.sample, self.reference
        warm_up()
        targets = None
        if self.sampled:
            rng = np.random.default_rng(self.seed)
            size = min(self.sample_size, self.system.size)
            self.sample = np.sort(rng.choice(self.system.size, size=size, replace=False))
            targets = self.system.positions[self.sample]
            logger.warning(
                'N=%s exceeds the direct-sum budget of %s; computing the error on %s sampled targets',
                self.system.size,
                self.direct_budget,
                size,
            )
        start = time.perf_counter()
        self.reference = direct_sum(self.system, self.kernel, threads=threads, targets=targets)
        elapsed = time.perf_counter() - start
        self.t_direct_s = elapsed * self.system.size / self.reference.shape[0]
        logger.info('Direct sum took %.3f s (%s targets)', elapsed, self.reference.shape[0])
        return self.sample, self.reference

    def run(self, params: TreecodeParams, threads: int = 1, shrink: bool = False) -> RunReport:
        """
        Builds the tree, computes the moments, evaluates all targets and compares with the reference.

        The treecode outputs are kept in `self.outputs`.
        """
        sample, reference = self.compute_reference(threads)

        start = time.perf_counter()
        tree = build_tree(self.system, params.leaf_size, shrink=shrink)
        t_tree = time.perf_counter() - start

        start = time.perf_counter()
        compute_all_moments(tree, self.kernel, params.degree, threads=threads)
        t_moments = time.perf_counter() - start

        start = time.perf_counter()
        outputs, stats = evaluate_all(tree, params, self.kernel, threads=threads)
        t_traversal = time.perf_counter() - start

        self.outputs = outputs
        approx = outputs if sample is None else outputs[sample]
        error = relative_error(reference, approx)
        t_treecode = t_tree + t_moments + t_traversal
        report = RunReport(
            example=self.example,
            kernel=self.kernel.name,
            N=self.system.size,
            theta=params.theta,
            n=params.degree,
            N0=params.leaf_size,
            eps=float(getattr(self.kernel, 'epsilon', 0.0)),
            seed=self.seed,
            threads=threads,
            E=error,
            t_tree_s=t_tree,
            t_moments_s=t_moments,
            t_treecode_s=t_treecode,
            t_direct_s=self.t_direct_s,
            speedup=self.t_direct_s / t_treecode if t_treecode > 0 else 0.0,
            kernel_evals=stats.kernel_evals,
            moment_scalars=count_moment_storage(tree, params.degree),
            sampled=sample is not None,
            t_traversal_s=t_traversal,
            approximations=stats.approximations,
            direct_sums=stats.direct_sums,
        )
        logger.info(
            'theta=%s n=%s N0=%s: E=%.3e, treecode %.3f s',
            params.theta,
            params.degree,
            params.leaf_size,
            error,
            t_treecode,
        )
        return report


def run_experiment(
    config: ExampleConfig, params: TreecodeParams, kernel: Optional[Kernel] = None, threads: int = 1
) -> RunReport:
    """
    Generates the example, runs the treecode and returns its report.
    """
    return Experiment.from_config(config, kernel).run(params, threads=threads, shrink=settings.SHRINK)
