"""
Compiled point-pair sums for the built-in kernels.

Each target accumulates its sources in storage order on one thread, so the sums do not depend on
the number of threads numba runs with.
"""
import math

import numpy as np
from numba import njit, prange

STOKESLET = 0
STOKESLET_ROTLET = 1
COULOMB = 2


@njit(cache=True)
def accumulate(kind, eps, omit, tx, ty, tz, sources, weights, start, stop, out):  # pragma: no cover
    """
    Adds the interactions of target (tx, ty, tz) with sources[start:stop] to `out`.
    """
    eps2 = eps * eps
    a0 = 0.0
    a1 = 0.0
    a2 = 0.0
    a3 = 0.0
    a4 = 0.0
    a5 = 0.0
    for j in range(start, stop):
        dx = tx - sources[j, 0]
        dy = ty - sources[j, 1]
        dz = tz - sources[j, 2]
        r2 = dx * dx + dy * dy + dz * dz
        if omit and r2 == 0.0:
            continue
        if kind == COULOMB:
            a0 += weights[j, 0] / math.sqrt(r2)
            continue
        denom = r2 + eps2
        d3 = 8.0 * math.pi * denom * math.sqrt(denom)
        h1 = (2.0 * eps2 + r2) / d3
        h2 = 1.0 / d3
        f0 = weights[j, 0]
        f1 = weights[j, 1]
        f2 = weights[j, 2]
        fd = (f0 * dx + f1 * dy + f2 * dz) * h2
        a0 += f0 * h1 + fd * dx
        a1 += f1 * h1 + fd * dy
        a2 += f2 * h1 + fd * dz
        if kind == STOKESLET_ROTLET:
            d5 = d3 * denom
            d7 = d5 * denom
            half_q = 0.5 * (5.0 * eps2 + 2.0 * r2) / d5
            quarter_d1 = 0.25 * (10.0 * eps2 * eps2 - 7.0 * eps2 * r2 - 2.0 * r2 * r2) / d7
            n0 = weights[j, 3]
            n1 = weights[j, 4]
            n2 = weights[j, 5]
            nd = 0.25 * (n0 * dx + n1 * dy + n2 * dz) * (21.0 * eps2 + 6.0 * r2) / d7
            a0 += half_q * (n1 * dz - n2 * dy)
            a1 += half_q * (n2 * dx - n0 * dz)
            a2 += half_q * (n0 * dy - n1 * dx)
            a3 += half_q * (f1 * dz - f2 * dy) + quarter_d1 * n0 + nd * dx
            a4 += half_q * (f2 * dx - f0 * dz) + quarter_d1 * n1 + nd * dy
            a5 += half_q * (f0 * dy - f1 * dx) + quarter_d1 * n2 + nd * dz
    out[0] += a0
    if out.shape[0] > 1:
        out[1] += a1
        out[2] += a2
    if out.shape[0] > 3:
        out[3] += a3
        out[4] += a4
        out[5] += a5


@njit(parallel=True, cache=True)
def pair_sums(targets, sources, weights, kind, eps, omit, output_dim):  # pragma: no cover
    """
    Sums every source into every target, in parallel over targets.
    """
    out = np.zeros((targets.shape[0], output_dim))
    for t in prange(targets.shape[0]):
        accumulate(
            kind, eps, omit, targets[t, 0], targets[t, 1], targets[t, 2], sources, weights, 0, sources.shape[0], out[t]
        )
    return out
