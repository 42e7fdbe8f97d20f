#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Finite-state chain core: models, exact computations and simulation.
"""

from .models import (
    ChainSpec, ChainSpecFile, DoeblinBounds, MarginalSequence, PathBatch, StepKernel, VarianceStats
)
from .core import (
    doeblin_bounds, effective_observables, exact_moments, load_chain, make_chain, marginals,
    rho_sandwich, sandwich_bounds, stationary_distribution, validate_spec, with_observables
)
from .laws import DiscreteLaw
from .simulate import block_generator, iter_path_blocks, simulate_paths, simulate_sums
from .generators import (
    independent_chain, lattice_chain, random_chain, reference_chain, two_state_chain
)

__all__ = [
    'ChainSpec', 'ChainSpecFile', 'DoeblinBounds', 'MarginalSequence', 'PathBatch',
    'StepKernel', 'VarianceStats', 'DiscreteLaw',
    'validate_spec', 'load_chain', 'make_chain', 'with_observables', 'marginals',
    'effective_observables', 'doeblin_bounds', 'exact_moments', 'sandwich_bounds',
    'rho_sandwich', 'stationary_distribution',
    'block_generator', 'simulate_paths', 'simulate_sums', 'iter_path_blocks',
    'reference_chain', 'lattice_chain', 'two_state_chain', 'independent_chain', 'random_chain',
]
