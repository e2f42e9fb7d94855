import logging
import math
from contextlib import contextmanager
from typing import Any, Iterator, List, Tuple

import numba

from barycentric_treecode.exceptions import ImproperlyConfigured

logger = logging.getLogger('barycentric_treecode')

MAX_DEGREE = 20


def validate_theta(theta: Any) -> float:
    """
    Validates the multipole acceptance parameter.

    :param theta: MAC parameter, must lie in (0, 1]
    :return: theta as a float
    :raises: barycentric_treecode.exceptions.ImproperlyConfigured
    """
    if isinstance(theta, bool) or not isinstance(theta, (int, float)) or not 0 < theta <= 1:
        logger.error('Theta `%s` is invalid.', theta)
        raise ImproperlyConfigured(f'Theta `{theta}` is invalid. It should be a number in the interval (0, 1].')
    return float(theta)


def validate_degree(degree: Any) -> int:
    """
    Validates the interpolation degree.

    :param degree: polynomial degree n, 1 <= n <= 20
    :return: degree
    :raises: barycentric_treecode.exceptions.ImproperlyConfigured
    """
    if isinstance(degree, bool) or not isinstance(degree, int) or not 1 <= degree <= MAX_DEGREE:
        logger.error('Degree `%s` is invalid.', degree)
        raise ImproperlyConfigured(f'Degree `{degree}` is invalid. It should be an integer between 1 and {MAX_DEGREE}.')
    return degree


def validate_leaf_size(leaf_size: Any) -> int:
    """
    Validates the maximum leaf size N0.
    """
    if isinstance(leaf_size, bool) or not isinstance(leaf_size, int) or leaf_size < 1:
        logger.error('Leaf size `%s` is invalid.', leaf_size)
        raise ImproperlyConfigured(f'Leaf size `{leaf_size}` is invalid. It should be a positive integer.')
    return leaf_size


def validate_epsilon(epsilon: Any) -> float:
    """
    Validates the regularization parameter.
    """
    if (
        isinstance(epsilon, bool)
        or not isinstance(epsilon, (int, float))
        or not math.isfinite(epsilon)
        or epsilon < 0
    ):
        logger.error('Epsilon `%s` is invalid.', epsilon)
        raise ImproperlyConfigured(f'Epsilon `{epsilon}` is invalid. It should be a non-negative number.')
    return float(epsilon)


def validate_positive_int(value: Any, name: str) -> int:
    """
    Validates counts such as thread numbers and block sizes.
    """
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        logger.error('`%s` is invalid: %s', name, value)
        raise ImproperlyConfigured(f'`{name}` needs to be a positive integer, not `{value}`.')
    return value


def target_blocks(count: int, block_size: int) -> List[Tuple[int, int]]:
    """
    Splits `count` targets into contiguous [start, stop) blocks.

    Blocks depend only on the count and the block size, never on the number of threads,
    which keeps per-target results identical for every thread count.
    """
    return [(start, min(start + block_size, count)) for start in range(0, count, block_size)]


def parse_range(text: str, cast: type = float) -> List[Any]:
    """
    Parses `start:stop[:step]` (inclusive) or comma separated values.

    >>> parse_range('0.4:0.8:0.1')
    [0.4, 0.5, 0.6, 0.7, 0.8]
    >>> parse_range('1:3', int)
    [1, 2, 3]
    """
    try:
        if ':' not in text:
            return [cast(item) for item in text.split(',') if item.strip()]
        parts = text.split(':')
        if len(parts) not in (2, 3):
            raise ValueError(text)
        start, stop = cast(parts[0]), cast(parts[1])
        step = cast(parts[2]) if len(parts) == 3 else cast(1)
    except ValueError:
        raise ImproperlyConfigured(f'Could not parse `{text}`. Use `start:stop[:step]` or a comma separated list.')
    if step <= 0 or stop < start:
        raise ImproperlyConfigured(f'The range `{text}` is empty or has a non-positive step.')
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    values = [start + i * step for i in range(count)]
    if cast is float:
        return [round(value, 12) for value in values]
    return values


@contextmanager
def thread_limit(threads: int) -> Iterator[int]:
    """
    Runs the enclosed numba parallel loops on `threads` threads, restoring the previous count on exit.

    Requests above the size of numba's thread pool (NUMBA_NUM_THREADS) are clipped to it.

    :return: the thread count in effect
    """
    validate_positive_int(threads, 'threads')
    available = numba.config.NUMBA_NUM_THREADS
    if threads > available:
        logger.warning('Requested %s threads, numba was started with %s. Using %s.', threads, available, available)
        threads = available
    previous = numba.get_num_threads()
    numba.set_num_threads(threads)
    try:
        yield threads
    finally:
        numba.set_num_threads(previous)
