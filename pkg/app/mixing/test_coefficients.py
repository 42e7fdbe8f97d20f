#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Tests for psi-mixing coefficients, maximal correlation and lag joints.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from app.chain import (
    doeblin_bounds, exact_moments, independent_chain, lattice_chain, make_chain, random_chain,
    rho_sandwich, stationary_distribution
)
from app.common import ModelError
from app.mixing import (
    JointDistribution, bradley_gap, exhaustive_psi, joint_from_counts, lag_joint, mixing_coeffs,
    mixing_profile, psi_coeffs, rho_coeff
)

SYMMETRIC = JointDistribution([[0.3, 0.2], [0.2, 0.3]])


def _random_joint(rng, max_size):
    shape = rng.integers(2, max_size + 1, size=2)
    mass = rng.dirichlet(np.ones(shape[0] * shape[1]) * rng.uniform(0.3, 3.0)).reshape(shape)
    return JointDistribution(mass / mass.sum())


def test_product_measure():
    joint = JointDistribution(np.outer([0.2, 0.8], [0.5, 0.3, 0.2]))
    lo, hi = psi_coeffs(joint)
    assert lo == pytest.approx(1.0, abs=1e-12)
    assert hi == pytest.approx(1.0, abs=1e-12)
    assert rho_coeff(joint) == pytest.approx(0.0, abs=1e-12)
    assert bradley_gap(joint) == pytest.approx(0.0, abs=1e-12)


def test_symmetric_two_state_equality_case():
    lo, hi = psi_coeffs(SYMMETRIC)
    assert lo == pytest.approx(0.8, abs=1e-12)
    assert hi == pytest.approx(1.2, abs=1e-12)
    assert rho_coeff(SYMMETRIC) == pytest.approx(0.2, abs=1e-12)
    assert bradley_gap(SYMMETRIC) == pytest.approx(0.0, abs=1e-12)
    coeffs = mixing_coeffs(SYMMETRIC)
    assert coeffs.psi == pytest.approx(0.2, abs=1e-12)


def test_degenerate_marginal_is_flagged():
    joint = JointDistribution([[0.4, 0.6], [0.0, 0.0]])
    coeffs = mixing_coeffs(joint)
    assert coeffs.degenerate
    assert (coeffs.psi_lower, coeffs.psi_upper, coeffs.rho) == (1.0, 1.0, 0.0)
    assert coeffs.dropped["left"] == [1]


def test_joint_rejects_bad_mass():
    with pytest.raises(ModelError):
        JointDistribution([[0.5, 0.6]])
    with pytest.raises(ModelError):
        joint_from_counts([[0, 0], [0, 0]])


def test_bradley_inequality_sweep():
    rng = np.random.default_rng(123)
    for _ in range(10_000):
        coeffs = mixing_coeffs(_random_joint(rng, 6))
        assert coeffs.psi_lower <= 1.0 + 1e-12 <= coeffs.psi_upper + 2e-12
        assert 0.0 <= coeffs.rho <= 1.0
        assert coeffs.bradley_gap >= -1e-10


def test_singletons_match_exhaustive_enumeration():
    rng = np.random.default_rng(321)
    for _ in range(500):
        joint = _random_joint(rng, 4)
        lo, hi = psi_coeffs(joint)
        ex_lo, ex_hi = exhaustive_psi(joint)
        assert lo == pytest.approx(ex_lo, abs=1e-12)
        assert hi == pytest.approx(ex_hi, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4),
       st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4))
def test_rho_dominates_random_score_correlations(left_scores, right_scores):
    rng = np.random.default_rng(7)
    joint = _random_joint(rng, 3)
    pX, pY = joint.left_marginal, joint.right_marginal
    rho = rho_coeff(joint)

    def standardize(f, p):
        f = f - p @ f
        return f / np.sqrt(p @ (f * f))

    f = standardize(np.resize(np.asarray(left_scores), joint.left_size), pX)
    g = standardize(np.resize(np.asarray(right_scores), joint.right_size), pY)
    if np.all(np.isfinite(f)) and np.all(np.isfinite(g)):
        assert abs(f @ joint.mass @ g) <= rho + 1e-12


def test_rho_matches_randomized_correlation_search():
    rng = np.random.default_rng(99)
    joint = JointDistribution(rng.dirichlet(np.ones(9)).reshape(3, 3))
    pX, pY = joint.left_marginal, joint.right_marginal
    best = 0.0
    for _ in range(10_000):
        f = rng.normal(size=3)
        g = rng.normal(size=3)
        f = f - pX @ f
        g = g - pY @ g
        corr = (f @ joint.mass @ g) / np.sqrt((pX @ f ** 2) * (pY @ g ** 2))
        best = max(best, abs(corr))
    rho = rho_coeff(joint)
    assert best <= rho + 1e-12
    assert best >= rho - 2e-2


def test_lag_joint_examples():
    laws = [[0.2, 0.8], [0.6, 0.4], [0.3, 0.7]]
    joint = lag_joint(independent_chain(laws, [0.0, 1.0]), 1, 2)
    np.testing.assert_allclose(joint.mass, np.outer(laws[0], laws[2]), atol=1e-15)
    np.testing.assert_allclose(lag_joint(lattice_chain(), 1, 1).mass, [[0.3, 0.2], [0.2, 0.3]], atol=1e-15)


def test_lag_two_equals_squared_kernel():
    rng = np.random.default_rng(3)
    chain = random_chain(rng, 4, 6, homogeneous=True)
    Q = chain.kernel(2)
    squared = make_chain(chain.initial, Q @ Q, chain.observable(1))
    np.testing.assert_allclose(lag_joint(chain, 1, 2).mass, lag_joint(squared, 1, 1).mass, atol=1e-14)


def test_lag_joint_index_errors():
    with pytest.raises(ModelError):
        lag_joint(lattice_chain(), 0, 1)
    with pytest.raises(ModelError):
        lag_joint(lattice_chain(), 3, 2, n=4)


def test_lag_one_coefficients_within_doeblin_constants():
    rng = np.random.default_rng(17)
    for _ in range(50):
        chain = random_chain(rng, 5, 8)
        bounds = doeblin_bounds(chain, 8)
        for profile in mixing_profile(chain, 8, [1]):
            assert profile.psi_lower >= bounds.a - 1e-12
            assert profile.psi_upper <= bounds.b + 1e-12


def _stationary_homogeneous(rng, size):
    chain = random_chain(rng, size, 2, homogeneous=True)
    Q = chain.kernel(2)
    return make_chain(stationary_distribution(Q), Q, chain.observable(1))


def test_decay_and_submultiplicativity_on_stationary_chains():
    rng = np.random.default_rng(29)
    for _ in range(30):
        chain = _stationary_homogeneous(rng, 4)
        a = doeblin_bounds(chain, 8).a
        coeffs = {k: mixing_coeffs(lag_joint(chain, 1, k)) for k in range(1, 7)}
        for k, c in coeffs.items():
            assert 1 - c.psi_lower <= (1 - a) ** k + 1e-10
        for k in (1, 2, 3):
            for m in (1, 2, 3):
                assert 1 - coeffs[k + m].psi_lower <= (1 - coeffs[k].psi_lower) * (1 - coeffs[m].psi_lower) + 1e-10
                assert coeffs[k + m].rho <= coeffs[k].rho * coeffs[m].rho + 1e-10


def test_rho_sandwich_on_reversible_chain():
    Q = np.array([[0.5, 0.3, 0.2], [0.3, 0.4, 0.3], [0.2, 0.3, 0.5]])
    chain = make_chain([1 / 3] * 3, Q, [0.0, 1.0, 3.0])
    rho1 = rho_coeff(lag_joint(chain, 1, 1))
    lo, hi = rho_sandwich(rho1)
    for n in (5, 20, 80):
        ratio = exact_moments(chain, n).ratio
        assert lo - 1e-12 <= ratio <= hi + 1e-12


def test_profile_rows_cover_every_start():
    profiles = mixing_profile(lattice_chain(), 6, [1, 2, 5])
    assert [p.lag for p in profiles] == [1, 2, 5]
    assert [len(p.per_start) for p in profiles] == [5, 4, 1]
    assert profiles[0].rho == pytest.approx(0.2, abs=1e-12)
    assert profiles[1].rho == pytest.approx(0.04, abs=1e-12)
