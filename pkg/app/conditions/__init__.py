#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Finite-scale diagnostics for the hypotheses of the local limit theorem.
"""

from .models import ConditionReport
from .diagnostics import (
    c1c2_diagnostics, condition_A1_ratio, condition_A_profile, condition_B1_mass, condition_B2_statistic,
    condition_B_profile, lindeberg_profile
)
from .infvar import infvar_diagnostics

__all__ = [
    'ConditionReport',
    'lindeberg_profile', 'condition_A_profile', 'condition_A1_ratio', 'condition_B_profile',
    'condition_B1_mass', 'condition_B2_statistic', 'c1c2_diagnostics', 'infvar_diagnostics',
]
