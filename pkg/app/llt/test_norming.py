#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Tests for the b_n norming constants.
"""

import numpy as np
import pytest

from app.chain import DiscreteLaw
from app.common import ModelError
from app.llt import norming_constant, norming_sequence


def _heavy_law(size=20_000):
    k = np.arange(1, size + 1)
    probs = 1.0 / (k * k)
    return DiscreteLaw(np.where(k % 2 == 0, 1.0, -1.0) * np.sqrt(k), probs / probs.sum()).centered()


def test_finite_variance_norming_is_sigma_root_n():
    law = DiscreteLaw([-1.0, 0.0, 1.0], [0.25, 0.5, 0.25])
    result = norming_sequence(law, [2, 10, 100])
    np.testing.assert_allclose(result.b ** 2 / (result.n_grid * 0.5), 1.0, rtol=1e-9)
    assert result.finite_variance
    assert norming_constant(law, 1) == 1.0
    assert result.at(10) == pytest.approx(np.sqrt(5.0))


def test_heavy_tail_norming_solves_the_fixed_point():
    law = _heavy_law()
    result = norming_sequence(law, [10, 100, 1000])
    H = law.truncated_second_moment(result.b)
    ratio = result.b ** 2 / (result.n_grid * H)
    assert np.all((ratio >= 0.9) & (ratio <= 1.1))
    np.testing.assert_allclose(ratio, 1.0, rtol=1e-9)
    assert not result.finite_variance


def test_consecutive_norming_ratio_tends_to_one():
    result = norming_sequence(_heavy_law(), [100, 10_000])
    assert abs(result.ratio_prev[-1] - 1.0) <= 1e-3
    assert np.isnan(norming_sequence(_heavy_law(100), [1]).ratio_prev[0])


def test_norming_errors():
    with pytest.raises(ModelError):
        norming_constant(DiscreteLaw([0.0], [1.0]), 5)
    with pytest.raises(ModelError):
        norming_constant(DiscreteLaw([-1.0, 1.0], [0.5, 0.5]), 0)
    with pytest.raises(KeyError):
        norming_sequence(DiscreteLaw([-1.0, 1.0], [0.5, 0.5]), [4]).at(5)
