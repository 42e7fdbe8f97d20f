#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Monte Carlo verification of the local limit theorem and its corollaries.
"""

from .windows import WindowFunction
from .sums import LinearProcessSpec, SumSamples, build_sums, sums_from_values
from .scans import LLTReport, clt_ks, interval_scan, llt_scan
from .norming import NormingResult, norming_constant, norming_sequence

__all__ = [
    'WindowFunction', 'LinearProcessSpec', 'SumSamples', 'LLTReport', 'NormingResult',
    'build_sums', 'sums_from_values', 'llt_scan', 'interval_scan', 'clt_ks',
    'norming_constant', 'norming_sequence',
]
