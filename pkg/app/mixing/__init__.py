#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Psi-mixing and maximal correlation coefficients.
"""

from .coefficients import (
    JointDistribution, LagProfile, MixingCoeffs, bradley_gap, exhaustive_psi, joint_from_counts,
    lag_joint, mixing_coeffs, mixing_profile, psi_coeffs, rho_coeff
)

__all__ = [
    'JointDistribution', 'MixingCoeffs', 'LagProfile',
    'lag_joint', 'psi_coeffs', 'rho_coeff', 'bradley_gap', 'mixing_coeffs',
    'exhaustive_psi', 'joint_from_counts', 'mixing_profile',
]
