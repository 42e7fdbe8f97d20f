#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Tests for partial-sum construction in plain, weighted and linear modes.
"""

import numpy as np
import pytest

from app.chain import effective_observables, marginals, reference_chain, simulate_paths
from app.common import ModelError
from app.llt import LinearProcessSpec, build_sums, sums_from_values


def test_unit_weights_reproduce_plain_sums_bitwise():
    chain = reference_chain()
    plain = build_sums(chain, 40, 5000, seed=12, mode="plain")
    weighted = build_sums(chain, 40, 5000, seed=12, mode="weighted", lp=LinearProcessSpec(weights=[1.0]))
    assert plain.values.tobytes() == weighted.values.tobytes()
    assert plain.norming == pytest.approx(weighted.norming, rel=1e-12)


def test_same_seed_same_sums():
    chain = reference_chain()
    first = build_sums(chain, 25, 3000, seed=44, threads=1, block_size=256)
    second = build_sums(chain, 25, 3000, seed=44, threads=3, block_size=256)
    assert first.values.tobytes() == second.values.tobytes()
    assert first.provenance == {"chain": "reference", "seed": 44, "mode": "plain"}


def test_plain_sums_are_centered_with_exact_spread():
    samples = build_sums(reference_chain(), 50, 20_000, seed=5)
    assert abs(samples.mean_zscore()) <= 4.0
    assert np.var(samples.values, ddof=1) == pytest.approx(samples.norming ** 2, rel=0.05)


def test_weighted_norming_uses_weighted_observables():
    chain = reference_chain()
    lp = LinearProcessSpec(weights=[0.5, 1.0, 2.0], m=0.5, M=2.0)
    samples = build_sums(chain, 60, 20_000, seed=8, mode="weighted", lp=lp)
    plain = build_sums(chain, 60, 10, seed=8)
    assert samples.norming > plain.norming
    assert np.var(samples.values, ddof=1) == pytest.approx(samples.norming ** 2, rel=0.05)


def test_weights_outside_bounds_rejected():
    lp = LinearProcessSpec(weights=[0.5, 3.0], m=0.5, M=2.0)
    with pytest.raises(ModelError, match="a_\\(n,2\\)"):
        lp.weights_for(4)
    with pytest.raises(ModelError):
        LinearProcessSpec(weights=[1.0, 0.0]).weights_for(3)
    with pytest.raises(ModelError):
        build_sums(reference_chain(), 5, 10, seed=1, mode="weighted")


def test_identity_filter_coefficients():
    lp = LinearProcessSpec(coefficients=[1.0])
    assert lp.truncation_for(4) == 4
    np.testing.assert_array_equal(lp.b_coefficients(4), [0, 1, 1, 1, 1, 0, 0, 0])


def test_geometric_filter_partials_and_truncation():
    lp = LinearProcessSpec.geometric(0.5, terms=64)
    np.testing.assert_allclose(lp.partials[:4], [0.5, 0.75, 0.875, 0.9375])
    assert lp.limit == pytest.approx(1.0, abs=1e-15)
    assert lp.truncation_for(10) == 36
    assert lp.truncation_for(100) == 100
    with pytest.raises(ModelError):
        LinearProcessSpec.geometric(0.5, truncation=3).truncation_for(5)
    with pytest.raises(ModelError):
        LinearProcessSpec.geometric(1.5)


def test_vanishing_partial_sum_rejected():
    with pytest.raises(ModelError, match="inf_j"):
        LinearProcessSpec(coefficients=[1.0, -1.0]).check_linear()


def test_b_coefficients_match_direct_double_sum():
    chain = reference_chain()
    n, K = 5, 25
    lp = LinearProcessSpec.geometric(0.5, terms=60, truncation=K)
    length = n + K
    paths = simulate_paths(chain, length, 100, seed=11).states
    h = effective_observables(chain, marginals(chain, length))
    X = h[np.arange(length)[None, :], paths]

    direct = np.zeros(100)
    for k in range(1, n + 1):
        for i in range(1, length - k + 1):
            direct += lp.coefficient(i) * X[:, k + i - 1]
    b = lp.b_coefficients(n, K)
    np.testing.assert_allclose(X @ b, direct, rtol=0, atol=1e-12)

    samples = build_sums(chain, n, 100, seed=11, mode="linear", lp=lp)
    np.testing.assert_allclose(samples.values, direct, rtol=0, atol=1e-12)
    assert samples.provenance["truncation"] == K
    assert set(samples.alt_norming) == {"v_n_abs_A", "sigma_filtered"}


def test_sums_from_values_validation():
    samples = sums_from_values([1.0, -1.0, 0.5], n=3, norming=2.0, mode="infvar", provenance={"seed": 1})
    assert samples.count == 3
    np.testing.assert_allclose(samples.standardized(), [0.5, -0.5, 0.25])
    with pytest.raises(ModelError):
        sums_from_values([], n=3, norming=1.0)
    with pytest.raises(ModelError):
        sums_from_values([1.0], n=3, norming=0.0)
    with pytest.raises(ModelError):
        build_sums(reference_chain(), 5, 10, seed=1, mode="bogus")
