#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Seeded path simulation.

Paths are grouped in fixed-size blocks; block b draws from a Philox stream
keyed by (seed, b). Output therefore depends on (chain, seed, path index)
only, never on how many workers ran the blocks.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, Optional, Tuple

import numpy as np
from tqdm import tqdm

from ..common import BLOCK_SIZE, SHOW_PROGRESS, ModelError, get_logger, resolve_threads
from .core import effective_observables, marginals
from .models import ChainSpec, PathBatch

logger = get_logger(__name__)

SEED_MASK = (1 << 64) - 1


def block_generator(seed: int, block_index: int) -> np.random.Generator:
    """Counter-based stream for one block of paths."""
    sequence = np.random.SeedSequence(entropy=int(seed) & SEED_MASK, spawn_key=(int(block_index),))
    return np.random.Generator(np.random.Philox(sequence))


def _thresholds(probabilities: np.ndarray) -> np.ndarray:
    # Inverse-CDF cut points; the last column is implied.
    return np.cumsum(probabilities, axis=-1)[..., :-1]


def iter_block_states(chain: ChainSpec, n: int, rng: np.random.Generator,
                      paths: int) -> Iterator[np.ndarray]:
    """Yield the states of `paths` paths at steps 1..n, one step at a time."""
    cut = _thresholds(chain.initial)
    state = (cut[None, :] <= rng.random(paths)[:, None]).sum(axis=1)
    yield state
    cached: Optional[np.ndarray] = _thresholds(chain.kernel(2)) if chain.homogeneous_kernel and n > 1 else None
    for k in range(2, n + 1):
        cut = cached if cached is not None else _thresholds(chain.kernel(k))
        state = (cut[state] <= rng.random(paths)[:, None]).sum(axis=1)
        yield state


def _block_ranges(count: int, block_size: int):
    for index, start in enumerate(range(0, count, block_size)):
        yield index, start, min(start + block_size, count)


def run_blocks(count: int, block_size: int, threads: int, work: Callable[[int, int, int], np.ndarray],
               out: np.ndarray, desc: str) -> np.ndarray:
    """Fill out[start:stop] with work(index, start, stop) over all blocks."""
    blocks = list(_block_ranges(count, block_size))
    workers = min(resolve_threads(threads), max(len(blocks), 1))

    def _run(block: Tuple[int, int, int]):
        index, start, stop = block
        out[start:stop] = work(index, start, stop)
        return stop - start

    with ThreadPoolExecutor(max_workers=workers) as pool:
        for _ in tqdm(pool.map(_run, blocks), total=len(blocks), desc=desc, disable=not SHOW_PROGRESS):
            pass
    return out


def simulate_paths(chain: ChainSpec, n: int, count: int, seed: int, threads: int = 0,
                   block_size: int = BLOCK_SIZE) -> PathBatch:
    """Draw `count` full paths of length n (count x n state indices)."""
    if count < 1:
        raise ModelError(f"path count must be >= 1, got {count}")
    marginals(chain, n)  # horizon check
    dtype = np.int16 if chain.size < 2 ** 15 else np.int32
    states = np.empty((count, n), dtype=dtype)

    def _work(index, start, stop):
        rng = block_generator(seed, index)
        block = np.empty((stop - start, n), dtype=dtype)
        for k, state in enumerate(iter_block_states(chain, n, rng, stop - start)):
            block[:, k] = state
        return block

    run_blocks(count, block_size, threads, _work, states, "paths")
    logger.info("✅ Simulated paths", chain=chain.name, count=count, n=n, seed=seed)
    return PathBatch(count=count, length=n, seed=seed, states=states, block_size=block_size)


def iter_path_blocks(chain: ChainSpec, n: int, count: int, seed: int,
                     block_size: int = BLOCK_SIZE) -> Iterator[Tuple[int, np.ndarray]]:
    """Stream (first path index, states block) without holding every path."""
    marginals(chain, n)
    for index, start, stop in _block_ranges(count, block_size):
        rng = block_generator(seed, index)
        block = np.empty((stop - start, n), dtype=np.int32)
        for k, state in enumerate(iter_block_states(chain, n, rng, stop - start)):
            block[:, k] = state
        yield start, block


def simulate_sums(chain: ChainSpec, n: int, count: int, seed: int,
                  weights: Optional[np.ndarray] = None, observables: Optional[np.ndarray] = None,
                  threads: int = 0, block_size: int = BLOCK_SIZE) -> np.ndarray:
    """
    Monte Carlo draws of Σ_k w_k h_k(ξ_k) without storing paths.

    Args:
        weights: per-step multipliers (default all ones)
        observables: n x size matrix (default the chain's effective observables)

    Returns:
        array of `count` partial sums, path i at position i
    """
    if count < 1:
        raise ModelError(f"path count must be >= 1, got {count}")
    if observables is None:
        observables = effective_observables(chain, marginals(chain, n))
    else:
        marginals(chain, n)
    weights = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    if weights.shape != (n,) or observables.shape != (n, chain.size):
        raise ModelError("weights/observables do not match the chain length")
    sums = np.empty(count)

    def _work(index, start, stop):
        rng = block_generator(seed, index)
        total = np.zeros(stop - start)
        for k, state in enumerate(iter_block_states(chain, n, rng, stop - start)):
            total += weights[k] * observables[k][state]
        return total

    run_blocks(count, block_size, threads, _work, sums, "sums")
    logger.info("✅ Simulated partial sums", chain=chain.name, count=count, n=n, seed=seed)
    return sums
