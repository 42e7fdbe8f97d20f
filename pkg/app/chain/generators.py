#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Built-in chains and random chain ensembles for sweeps.
"""

import math
from typing import Optional

import numpy as np

from ..common import get_logger
from .core import doeblin_bounds, make_chain
from .models import ChainSpec

logger = get_logger(__name__)

# Doubly stochastic, uniform stationary law, ratios Q/P in {0.6, 1.2}.
REFERENCE_KERNEL = [
    [0.4, 0.4, 0.2],
    [0.2, 0.4, 0.4],
    [0.4, 0.2, 0.4],
]
REFERENCE_VALUES = [0.0, 1.0, math.sqrt(2.0)]

LATTICE_KERNEL = [[0.6, 0.4], [0.4, 0.6]]


def reference_chain() -> ChainSpec:
    """Stationary 3-state nonlattice chain, values {0, 1, √2} centered, a = 0.6."""
    return make_chain([1 / 3, 1 / 3, 1 / 3], REFERENCE_KERNEL, REFERENCE_VALUES, name="reference")


def lattice_chain() -> ChainSpec:
    """Stationary 2-state chain with observable ±1."""
    return make_chain([0.5, 0.5], LATTICE_KERNEL, [-1.0, 1.0], name="lattice")


def two_state_chain(initial=(1.0, 0.0)) -> ChainSpec:
    return make_chain(list(initial), LATTICE_KERNEL, [-1.0, 1.0], name="two-state")


def independent_chain(laws, observables, center: bool = True) -> ChainSpec:
    """
    Chain whose step-k kernel has every row equal to laws[k-1], so the
    steps are independent with marginals `laws`.
    """
    laws = np.asarray(laws, dtype=float)
    kernels = [np.tile(law, (laws.shape[1], 1)) for law in laws[1:]]
    if not kernels:
        kernels = np.tile(laws[0], (laws.shape[1], 1))
    return make_chain(laws[0], kernels, observables, center=center, name="independent")


def random_chain(rng: np.random.Generator, size: int, n: int, homogeneous: bool = False,
                 min_a: float = 0.0, max_tries: int = 200) -> ChainSpec:
    """
    Random nonstationary chain mixing Dirichlet rows with a common row.

    Draws are rejected until the Doeblin lower constant exceeds `min_a`.
    """
    for _ in range(max_tries):
        initial = rng.dirichlet(np.ones(size))
        steps = 1 if homogeneous else max(n - 1, 1)
        kernels = []
        for _ in range(steps):
            weight = rng.uniform(0.3, 0.95)
            common = rng.dirichlet(np.ones(size))
            rows = rng.dirichlet(np.ones(size), size=size)
            kernels.append(weight * common[None, :] + (1.0 - weight) * rows)
        kernels = np.asarray(kernels)
        # Renormalize away the rounding of the convex combination.
        kernels /= kernels.sum(axis=-1, keepdims=True)
        observables = rng.normal(size=(n, size))
        chain = make_chain(initial, kernels[0] if homogeneous else kernels, observables, name="random")
        if min_a <= 0 or doeblin_bounds(chain, n).a > min_a:
            return chain
    logger.warning("⚠️ Random chain rejection budget exhausted", size=size, min_a=min_a)
    raise RuntimeError(f"no chain with a > {min_a} after {max_tries} draws")
