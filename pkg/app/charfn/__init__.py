#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Transfer operators and characteristic-function bounds.
"""

from .transfer import (
    BoundReport, CharFnValue, TransferMatrix, charfn_grid, exact_charfn, nagaev_bound,
    step_charfn, step_charfn_grid, sup_norm, transfer_matrix
)

__all__ = [
    'CharFnValue', 'TransferMatrix', 'BoundReport',
    'step_charfn', 'step_charfn_grid', 'transfer_matrix', 'sup_norm',
    'exact_charfn', 'charfn_grid', 'nagaev_bound',
]
