#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Continued-fraction digits under the Gauss measure as a worked example.
"""

from .digits import (
    DEFAULT_CAP, MAX_DIGITS, GaussSamples, TruncatedDigitChain, bounded_observable, digit_law,
    digit_marginal, digit_sums, empirical_chain, empirical_lag_joint, infvar_law, infvar_observable,
    infvar_tail_sums, sample_digits
)

__all__ = [
    'DEFAULT_CAP', 'MAX_DIGITS', 'GaussSamples', 'TruncatedDigitChain',
    'sample_digits', 'digit_marginal', 'digit_law', 'empirical_chain', 'empirical_lag_joint',
    'bounded_observable', 'infvar_observable', 'infvar_law', 'infvar_tail_sums', 'digit_sums',
]
