#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Tests for window functions and the local limit scans, validated on exact
Gaussian draws.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from app.common import ModelError
from app.llt import WindowFunction, clt_ks, interval_scan, llt_scan, sums_from_values


@pytest.fixture(scope="module")
def gaussian_samples():
    rng = np.random.default_rng(8)
    return sums_from_values(5.0 * rng.standard_normal(2_000_000), n=1, norming=5.0, mode="gaussian")


@pytest.mark.parametrize("kind", ["triangular", "epanechnikov"])
@pytest.mark.parametrize("width", [0.1, 0.5, 3.0])
def test_window_integral_matches_quadrature(kind, width):
    h = WindowFunction(kind, width)
    assert abs(h.integral - h.quadrature_integral()) <= 1e-10
    assert h(0.0) == 1.0
    assert h(width) == 0.0 and h(-2 * width) == 0.0


def test_window_names_and_errors():
    assert WindowFunction.from_name("tri", 1).integral == 1.0
    assert WindowFunction.from_name("epa", 0.75).integral == pytest.approx(1.0)
    with pytest.raises(ModelError):
        WindowFunction.from_name("box", 1.0)
    with pytest.raises(ModelError):
        WindowFunction("triangular", 0.0)


def test_window_scan_reproduces_gaussian(gaussian_samples):
    report = llt_scan(gaussian_samples, WindowFunction("triangular", 0.5), np.linspace(-10, 10, 61))
    assert report.sup_abs_dev <= 0.01
    assert report.consistent(alpha=1e-3)
    assert np.all(report.stderr > 0)
    assert report.sup_abs_dev == pytest.approx(np.max(np.abs(report.estimate - report.predicted)))


def test_unit_norming_deviation_is_the_smoothing_bias():
    rng = np.random.default_rng(9)
    samples = sums_from_values(rng.standard_normal(1_000_000), n=1, norming=1.0)
    h = WindowFunction("triangular", 0.5)
    report = llt_scan(samples, h, [0.0])
    bias = quad(lambda t: float(h(t)) * math.exp(-t * t / 2), -0.5, 0.5, points=[0.0])[0] - h.integral
    assert bias == pytest.approx(-0.0102, abs=1e-4)
    assert abs(report.estimate[0] - report.predicted[0] - bias) <= 5 * report.stderr[0]


def test_far_shift_has_no_mass():
    rng = np.random.default_rng(10)
    samples = sums_from_values(rng.standard_normal(100_000), n=1, norming=1.0)
    report = llt_scan(samples, WindowFunction("epanechnikov", 0.5), [10.0], target_stderr=None)
    assert report.predicted[0] < 1e-20
    assert report.estimate[0] == 0.0
    assert report.stderr[0] > 0


def test_interval_scan_recovers_lebesgue_measure(gaussian_samples):
    report = interval_scan(gaussian_samples, -1.0, 1.0, [0.0])
    assert report.estimate[0] == pytest.approx(2.0, rel=0.05)
    assert not report.inconclusive
    assert report.extras["lebesgue_sup"] == pytest.approx(abs(report.estimate[0] - 2.0))


def test_disjoint_intervals_of_equal_length_agree(gaussian_samples):
    left = interval_scan(gaussian_samples, -1.5, -0.5, [0.0])
    right = interval_scan(gaussian_samples, 0.5, 1.5, [0.0])
    joint = math.hypot(left.stderr[0], right.stderr[0])
    assert abs(left.estimate[0] - right.estimate[0]) <= 3 * joint


def test_vanishing_interval_is_inconclusive():
    rng = np.random.default_rng(12)
    samples = sums_from_values(5.0 * rng.standard_normal(100_000), n=1, norming=5.0)
    assert interval_scan(samples, 0.0, 1e-4, [0.0]).inconclusive
    with pytest.raises(ModelError):
        interval_scan(samples, 1.0, 1.0, [0.0])


def test_ks_distance(gaussian_samples):
    assert clt_ks(gaussian_samples) <= 0.005
    constant = sums_from_values(np.zeros(1000), n=1, norming=1.0)
    assert clt_ks(constant) == pytest.approx(0.5)
