import logging
from typing import Callable, Dict

from barycentric_treecode.exceptions import ImproperlyConfigured
from barycentric_treecode.kernels.base import Kernel, SelfInteraction
from barycentric_treecode.kernels.coulomb import CoulombKernel, coulomb_eval
from barycentric_treecode.kernels.mrs import (
    StokesletKernel,
    StokesletRotletKernel,
    mrs_scalars,
    stokeslet_eval,
    stokeslet_rotlet_eval,
)

logger = logging.getLogger('barycentric_treecode')

KERNELS: Dict[str, Callable[[float], Kernel]] = {
    'stokeslet': StokesletKernel,
    'stokeslet-rotlet': StokesletRotletKernel,
    'coulomb': CoulombKernel,
}


def get_kernel(name: str, epsilon: float = 0.0) -> Kernel:
    """
    Returns the kernel registered under `name`.

    :param name: one of `stokeslet`, `stokeslet-rotlet`, `coulomb`
    :param epsilon: regularization parameter, ignored by the Coulomb kernel
    :raises: barycentric_treecode.exceptions.ImproperlyConfigured
    """
    logger.debug('Returning `%s` kernel', name)
    if name not in KERNELS:
        logger.error('Kernel `%s` is not registered.', name)
        raise ImproperlyConfigured(f'Kernel `{name}` is invalid. Should be one of: {", ".join(KERNELS)}.')
    return KERNELS[name](epsilon)


def kernel_for_weight_dim(weight_dim: int, epsilon: float) -> Kernel:
    """
    Picks the kernel matching a particle file's weight dimension.
    """
    for name, factory in KERNELS.items():
        if factory.weight_dim == weight_dim:  # type: ignore
            return get_kernel(name, epsilon)
    raise ImproperlyConfigured(f'No kernel takes weights with {weight_dim} component(s).')


__all__ = [
    'Kernel',
    'SelfInteraction',
    'StokesletKernel',
    'StokesletRotletKernel',
    'CoulombKernel',
    'get_kernel',
    'kernel_for_weight_dim',
    'mrs_scalars',
    'stokeslet_eval',
    'stokeslet_rotlet_eval',
    'coulomb_eval',
]
