#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Norming constants for the normal domain of attraction: b_n solves
n H(b_n) = b_n^2 with H(x) = E(X^2 1{|X| <= x}).
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..chain import DiscreteLaw
from ..common import ModelError, get_logger

logger = get_logger(__name__)

GRID_FACTOR = 1.1
BISECTION_STEPS = 200


@dataclass(frozen=True)
class NormingResult:
    n_grid: np.ndarray
    b: np.ndarray
    ratio_prev: np.ndarray
    finite_variance: bool

    def at(self, n: int) -> float:
        index = np.flatnonzero(self.n_grid == n)
        if index.size == 0:
            raise KeyError(n)
        return float(self.b[index[0]])


def _excess(law: DiscreteLaw, n: int, x: float) -> float:
    return n * float(law.truncated_second_moment(x)) / (x * x)


def norming_constant(law: DiscreteLaw, n: int) -> float:
    """Smallest x at or above the smallest nonzero |atom| with n H(x) / x^2 <= 1."""
    if n < 1:
        raise ModelError(f"n must be >= 1, got {n}")
    nonzero = np.abs(law.values[np.abs(law.values) > 0])
    if nonzero.size == 0:
        raise ModelError("law is concentrated at 0, no norming exists")
    lo = float(nonzero.min())
    if _excess(law, n, lo) <= 1.0:
        return lo
    hi = lo * GRID_FACTOR
    while _excess(law, n, hi) > 1.0:
        lo, hi = hi, hi * GRID_FACTOR
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _excess(law, n, mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


def norming_sequence(law: DiscreteLaw, n_grid: Sequence[int]) -> NormingResult:
    """
    b_n on a grid of n, with b_n / b_{n-1} diagnostics.

    When every b_n lies beyond the largest atom, H is the full variance at
    that scale, b_n = sigma sqrt(n) and the finite-variance theorem applies.
    """
    law = law.centered() if abs(law.mean) > 1e-12 else law
    n_grid = np.asarray(sorted(set(int(n) for n in n_grid)))
    b = np.array([norming_constant(law, int(n)) for n in n_grid])
    prev = np.array([norming_constant(law, int(n) - 1) if n > 1 else np.nan for n in n_grid])
    finite = bool(np.all(b >= law.max_abs))
    if finite:
        logger.info("⚠️ Norming reached the largest atom: finite variance at this scale", max_abs=law.max_abs)
    return NormingResult(n_grid=n_grid, b=b, ratio_prev=b / prev, finite_variance=finite)
