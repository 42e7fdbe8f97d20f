#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Tests for seeded path simulation.
"""

import numpy as np
import pytest

from app.chain import (
    exact_moments, iter_path_blocks, make_chain, marginals, random_chain, simulate_paths,
    simulate_sums, two_state_chain
)


def test_absorbing_kernel_stays_put():
    chain = make_chain([1.0, 0.0], [[1.0, 0.0], [0.0, 1.0]], [0.0, 1.0])
    batch = simulate_paths(chain, 20, 500, seed=3)
    assert batch.states.shape == (500, 20)
    assert not batch.states.any()


def test_same_seed_same_paths_regardless_of_threads():
    chain = two_state_chain()
    one = simulate_paths(chain, 30, 5000, seed=99, threads=1, block_size=512)
    many = simulate_paths(chain, 30, 5000, seed=99, threads=4, block_size=512)
    assert one.states.tobytes() == many.states.tobytes()
    other = simulate_paths(chain, 30, 5000, seed=100, threads=1, block_size=512)
    assert one.states.tobytes() != other.states.tobytes()


def test_streamed_blocks_match_stored_paths():
    chain = two_state_chain()
    stored = simulate_paths(chain, 12, 3000, seed=7, block_size=1000)
    streamed = np.vstack([block for _, block in iter_path_blocks(chain, 12, 3000, seed=7, block_size=1000)])
    np.testing.assert_array_equal(stored.states, streamed)


def test_marginal_at_step_50_within_four_standard_errors():
    chain = two_state_chain()
    count = 200_000
    batch = simulate_paths(chain, 50, count, seed=2025)
    exact = marginals(chain, 50).at(50)[0]
    empirical = np.mean(batch.states[:, 49] == 0)
    stderr = np.sqrt(exact * (1 - exact) / count)
    assert abs(empirical - exact) <= 4 * stderr


def test_one_step_frequencies_match_kernel_rows():
    rng = np.random.default_rng(1)
    chain = random_chain(rng, 3, 6, homogeneous=True)
    batch = simulate_paths(chain, 6, 100_000, seed=17)
    prev, nxt = batch.states[:, :-1].ravel(), batch.states[:, 1:].ravel()
    Q = chain.kernel(2)
    for x in range(3):
        mask = prev == x
        total = mask.sum()
        counts = np.bincount(nxt[mask], minlength=3)
        stderr = np.sqrt(Q[x] * (1 - Q[x]) / total)
        assert np.all(np.abs(counts / total - Q[x]) <= 4 * stderr + 1e-12)


def test_partial_sum_variance_matches_exact_moments():
    rng = np.random.default_rng(8)
    chain = random_chain(rng, 4, 20)
    count = 40_000
    sums = simulate_sums(chain, 20, count, seed=5)
    stats = exact_moments(chain, 20)
    # Var of the sample variance is about 2 sigma^4 / count for near-normal sums.
    stderr = np.sqrt(2.0 / count) * stats.sigma_sq * 1.5
    assert abs(np.var(sums, ddof=1) - stats.sigma_sq) <= 3 * stderr
    assert abs(sums.mean()) <= 4 * np.sqrt(stats.sigma_sq / count)


def test_unit_weights_are_bit_identical_to_plain_sums():
    chain = two_state_chain()
    plain = simulate_sums(chain, 25, 3000, seed=4)
    weighted = simulate_sums(chain, 25, 3000, seed=4, weights=np.ones(25))
    assert plain.tobytes() == weighted.tobytes()


def test_simulate_rejects_bad_count():
    with pytest.raises(ValueError):
        simulate_paths(two_state_chain(), 5, 0, seed=1)
