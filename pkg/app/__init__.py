#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
MixLLT - exact mixing coefficients, characteristic-function bounds, condition
diagnostics and Monte Carlo local limit theorem checks for psi-mixing
(Doeblin-minorized) nonstationary finite-state Markov chains.
"""

__version__ = "1.0.0"
__author__ = "Heemeng Foo"
__description__ = "Local limit theorem toolkit for psi-mixing Markov chains"
