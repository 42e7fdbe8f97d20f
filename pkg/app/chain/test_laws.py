#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from app.chain import DiscreteLaw
from app.common import ModelError


def test_truncated_queries_on_three_points():
    law = DiscreteLaw([-2.0, 0.5, 3.0], [0.25, 0.5, 0.25])
    assert law.truncated_second_moment(1.0) == pytest.approx(0.125)
    assert law.truncated_second_moment(2.0) == pytest.approx(0.125 + 1.0)
    assert law.tail_prob(2.0) == pytest.approx(0.25)
    assert law.tail_second_moment(0.5) == pytest.approx(1.0 + 2.25)
    assert law.inner_mass(10.0) == pytest.approx(1.0)
    m = law.truncated_mean(2.0)
    assert m == pytest.approx(-0.25)
    direct = 0.25 * (-2.0 - m) ** 2 + 0.5 * (0.5 - m) ** 2
    assert law.truncated_variance(2.0) == pytest.approx(direct)


def test_rejects_bad_probabilities():
    with pytest.raises(ModelError):
        DiscreteLaw([1.0, 2.0], [0.7, 0.7])


def test_symmetrized_law_is_symmetric():
    law = DiscreteLaw([0.0, 1.0, 4.0], [0.2, 0.5, 0.3])
    sym = law.symmetrized()
    assert sym.mean == pytest.approx(0.0, abs=1e-15)
    assert sym.second_moment == pytest.approx(2 * law.centered().second_moment)
    np.testing.assert_allclose(sym.values, -sym.values[::-1])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-50, 50, allow_nan=False), min_size=1, max_size=12),
       st.floats(0.0, 60.0))
def test_queries_match_direct_sums(points, x):
    law = DiscreteLaw.from_sample(points)
    v, p = law.values, law.probs
    inside = np.abs(v) <= x
    assert law.truncated_second_moment(x) == pytest.approx(np.sum(p[inside] * v[inside] ** 2), abs=1e-9)
    assert law.tail_prob(x) == pytest.approx(np.sum(p[~inside]), abs=1e-12)
