"""
Command line interface.

    treecode generate --example 1 --N 10000 --output particles.txt
    treecode run --example 1 --N 10000 --theta 0.7 --n 7 --N0 2000 --eps 0.02 --threads 4
    treecode sweep --example 1 --N 10000 --theta 0.4:0.8:0.1 --n 1:10
    treecode scaling --example 1 --N 100000 --thread-counts 1,2,4,8
    treecode compare reference.txt approx.txt
"""
import argparse
import logging
import sys
from contextlib import contextmanager
from typing import IO, Any, Iterator, List, Optional, Sequence

import numpy as np

from barycentric_treecode import __version__
from barycentric_treecode.configuration import settings
from barycentric_treecode.engine import TreecodeParams
from barycentric_treecode.exceptions import ImproperlyConfigured, TreecodeError
from barycentric_treecode.harness import (
    Example1Config,
    Example2Config,
    Experiment,
    RunReport,
    default_kernel,
    gen_example1,
    gen_example2,
    read_outputs,
    read_particles,
    relative_error,
    write_csv,
    write_json,
    write_outputs,
    write_particles,
)
from barycentric_treecode.kernels import Kernel, get_kernel, kernel_for_weight_dim
from barycentric_treecode.utils import parse_range, validate_epsilon, validate_positive_int

logger = logging.getLogger('barycentric_treecode')

DEFAULT_LEAF_SIZE = {1: 2000, 2: 1000}
DEFAULT_EPSILON = {1: 0.02, 2: 0.3}


def _int_list(text: str) -> List[int]:
    try:
        return parse_range(text, int)
    except ImproperlyConfigured as e:
        raise argparse.ArgumentTypeError(str(e))


def _float_list(text: str) -> List[float]:
    try:
        return parse_range(text, float)
    except ImproperlyConfigured as e:
        raise argparse.ArgumentTypeError(str(e))


def _add_instance_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group('instance')
    group.add_argument('--example', type=int, choices=(1, 2), default=1, help='benchmark problem (default: 1)')
    group.add_argument('--input', help='read particles from this file instead of generating them')
    group.add_argument('--kernel', help='stokeslet, stokeslet-rotlet or coulomb (default: chosen by the example)')
    group.add_argument('--N', type=_int_list, default=[10000], help='particle count(s), example 1 (default: 10000)')
    group.add_argument('--g', type=int, default=15, help='rods per side, example 2 (default: 15)')
    group.add_argument('--M', type=int, default=150, help='segments per rod, example 2 (default: 150)')
    group.add_argument('--ell', type=float, default=0.02, help='organism length, example 1 (default: 0.02)')
    group.add_argument('--ell-equals-eps', action='store_true', help='set the organism length to epsilon')
    group.add_argument('--eps', type=_float_list, help='regularization parameter(s) (default: 0.02 / 0.3)')
    group.add_argument('--seed', type=int, default=1, help='random seed (default: 1)')


def _add_run_arguments(parser: argparse.ArgumentParser, ranges: bool = False) -> None:
    group = parser.add_argument_group('treecode')
    if ranges:
        group.add_argument('--theta', type=_float_list, default=None, help='MAC parameters, e.g. 0.4:0.8:0.1')
        group.add_argument('--n', type=_int_list, default=None, help='interpolation degrees, e.g. 1:10')
    else:
        group.add_argument('--theta', type=float, default=None, help='MAC parameter (default: 0.7)')
        group.add_argument('--n', type=int, default=None, help='interpolation degree (default: 7)')
    group.add_argument('--N0', type=int, default=None, help='maximum leaf size (default: 2000 / 1000)')
    group.add_argument('--threads', type=int, default=None, help='numba threads (default: 1 or $TREECODE_THREADS)')
    group.add_argument('--shrink', action='store_true', default=None, help='shrink child boxes to their particles')
    group.add_argument('--output', help='write reports here instead of stdout')
    group.add_argument('--format', choices=('csv', 'json'), default='csv', help='report format (default: csv)')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='treecode', description='Barycentric Lagrange treecode benchmarks.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='-v for info, -vv for debug logging')
    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True

    generate = subparsers.add_parser('generate', help='write a benchmark particle system to a file')
    _add_instance_arguments(generate)
    generate.add_argument('--output', required=True, help='particle file to write')

    run = subparsers.add_parser('run', help='run the treecode and the direct sum, report error and timings')
    _add_instance_arguments(run)
    _add_run_arguments(run)
    run.add_argument('--save-velocities', help='write the treecode outputs to this file')

    sweep = subparsers.add_parser('sweep', help='run a grid of N, epsilon, theta and n values')
    _add_instance_arguments(sweep)
    _add_run_arguments(sweep, ranges=True)

    scaling = subparsers.add_parser('scaling', help='run one instance with several thread counts')
    _add_instance_arguments(scaling)
    _add_run_arguments(scaling)
    scaling.add_argument('--thread-counts', type=_int_list, default=[1, 2, 4, 8], help='e.g. 1,2,4,8')

    compare = subparsers.add_parser('compare', help='print the relative error between two output files')
    compare.add_argument('reference', help='reference output file')
    compare.add_argument('approximation', help='approximate output file')
    return parser


def _configure_logging(verbosity: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')


def _epsilons(args: argparse.Namespace) -> List[float]:
    if args.eps:
        return [validate_epsilon(eps) for eps in args.eps]
    return [settings.EPSILON if settings.EPSILON is not None else DEFAULT_EPSILON[args.example]]


def _kernel(args: argparse.Namespace, eps: float, weight_dim: Optional[int] = None) -> Kernel:
    if args.kernel:
        return get_kernel(args.kernel, eps)
    if weight_dim is not None:
        return kernel_for_weight_dim(weight_dim, eps)
    return default_kernel(args.example, eps)


def _experiments(args: argparse.Namespace) -> Iterator[Experiment]:
    """
    Yields one experiment per (N, epsilon) combination.
    """
    for eps in _epsilons(args):
        if args.input:
            system = read_particles(args.input)
            yield Experiment(system, _kernel(args, eps, system.weight_dim), example=args.example, seed=args.seed)
            continue
        for config in _configs(args, eps):
            yield Experiment.from_config(config, _kernel(args, eps))


def _configs(args: argparse.Namespace, eps: float) -> List[Any]:
    if args.example == 2:
        return [Example2Config(g=args.g, M=args.M, eps=eps, seed=args.seed)]
    ell = eps if args.ell_equals_eps else args.ell
    return [Example1Config(N=count, ell=ell, eps=eps, seed=args.seed) for count in args.N]


def _params(args: argparse.Namespace, theta: Optional[float] = None, degree: Optional[int] = None) -> TreecodeParams:
    leaf_size = args.N0
    if leaf_size is None:
        leaf_size = settings.LEAF_SIZE or DEFAULT_LEAF_SIZE[args.example]
    return TreecodeParams(
        theta=settings.THETA if theta is None else theta,
        degree=settings.DEGREE if degree is None else degree,
        leaf_size=leaf_size,
    )


def _threads(args: argparse.Namespace) -> int:
    return validate_positive_int(settings.THREADS if args.threads is None else args.threads, 'threads')


def _shrink(args: argparse.Namespace) -> bool:
    return settings.SHRINK if args.shrink is None else args.shrink


@contextmanager
def _open_output(path: Optional[str]) -> Iterator[IO[str]]:
    if path is None:
        yield sys.stdout
    else:
        with open(path, 'w', newline='') as f:
            yield f


def _emit(reports: List[RunReport], args: argparse.Namespace) -> None:
    with _open_output(args.output) as stream:
        if args.format == 'json':
            write_json(reports, stream)
        else:
            write_csv(reports, stream)


def generate(args: argparse.Namespace) -> int:
    eps = _epsilons(args)[0]
    configs = _configs(args, eps)
    if len(configs) != 1:
        raise ImproperlyConfigured('`generate` writes a single system. Pass a single value to --N.')
    config = configs[0]
    system = gen_example1(config) if isinstance(config, Example1Config) else gen_example2(config)
    write_particles(system, args.output)
    logger.info('Wrote %s particles to %s', system.size, args.output)
    return 0


def run(args: argparse.Namespace) -> int:
    params = _params(args, args.theta, args.n)
    threads = _threads(args)
    reports = []
    for experiment in _experiments(args):
        reports.append(experiment.run(params, threads=threads, shrink=_shrink(args)))
        if args.save_velocities:
            write_outputs(experiment.outputs, args.save_velocities)  # type: ignore
    _emit(reports, args)
    return 0


def sweep(args: argparse.Namespace) -> int:
    thetas = args.theta or [settings.THETA]
    degrees = args.n or [settings.DEGREE]
    grid = [_params(args, theta, degree) for theta in thetas for degree in degrees]
    threads = _threads(args)
    reports = []
    for experiment in _experiments(args):
        for params in grid:
            reports.append(experiment.run(params, threads=threads, shrink=_shrink(args)))
    _emit(reports, args)
    return 0


def scaling(args: argparse.Namespace) -> int:
    params = _params(args, args.theta, args.n)
    counts = [validate_positive_int(count, 'thread-counts') for count in args.thread_counts]
    reports = []
    consistent = True
    for experiment in _experiments(args):
        baseline: Optional[np.ndarray] = None
        for threads in counts:
            reports.append(experiment.run(params, threads=threads, shrink=_shrink(args)))
            if baseline is None:
                baseline = experiment.outputs
            elif not np.array_equal(baseline, experiment.outputs):  # type: ignore
                logger.error('Outputs with %s threads differ from outputs with %s thread(s).', threads, counts[0])
                consistent = False
    _emit(reports, args)
    return 0 if consistent else 1


def compare(args: argparse.Namespace) -> int:
    error = relative_error(read_outputs(args.reference), read_outputs(args.approximation))
    print(f'{error:.6e}')
    return 0


COMMANDS = {'generate': generate, 'run': run, 'sweep': sweep, 'scaling': scaling, 'compare': compare}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parses the arguments and runs the command.

    :return: 0 on success, 1 on a runtime failure, 2 on invalid arguments
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    _configure_logging(args.verbose)
    logger.info('Running `%s` with %s', args.command, vars(args))
    try:
        return COMMANDS[args.command](args)
    except ImproperlyConfigured as e:
        parser.print_usage(sys.stderr)
        print(f'treecode: error: {e}', file=sys.stderr)
        return 2
    except (TreecodeError, OSError) as e:
        logger.error('Command `%s` failed: %s', args.command, e)
        print(f'treecode: {e}', file=sys.stderr)
        return 1


def main_entry() -> None:
    sys.exit(main())
