#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Kernel-smoothed and interval scans of S_n against the Gaussian local limit,
and the Kolmogorov-Smirnov distance of S_n / norming to N(0, 1).
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np
from scipy.stats import kstest, norm

from ..common import ModelError, get_logger
from .sums import SumSamples
from .windows import WindowFunction

logger = get_logger(__name__)

SQRT_2PI = float(np.sqrt(2.0 * np.pi))
DEFAULT_TARGET_STDERR = 0.01
INCONCLUSIVE_FRACTION = 0.25
GRID_SPAN = 3.0


@dataclass(frozen=True)
class LLTReport:
    u_grid: np.ndarray
    estimate: np.ndarray
    predicted: np.ndarray
    stderr: np.ndarray
    sup_abs_dev: float
    norming: float
    count: int
    kind: str = "window"
    inconclusive: bool = False
    extras: Dict[str, float] = field(default_factory=dict)

    def consistent(self, alpha: float = 0.05, bias: float = 0.0) -> bool:
        """
        Every |estimate - predicted| within a Bonferroni z-margin of its
        standard error (plus an optional absolute bias allowance).
        """
        z = norm.ppf(1.0 - alpha / (2.0 * max(len(self.u_grid), 1)))
        return bool(np.all(np.abs(self.estimate - self.predicted) <= z * self.stderr + bias))

    def rows(self):
        for values in zip(self.u_grid, self.estimate, self.predicted, self.stderr):
            yield tuple(float(v) for v in values)


def _check_grid(samples: SumSamples, u_grid: Sequence[float]) -> np.ndarray:
    if not samples.norming > 0:
        raise ModelError(f"norming must be > 0, got {samples.norming}")
    u = np.asarray(u_grid, dtype=float).ravel()
    if u.size == 0:
        raise ModelError("empty u-grid")
    if np.any(np.abs(u) > GRID_SPAN * samples.norming):
        logger.warning("⚠️ u-grid extends beyond 3 normings, predictions there are ~0",
                       norming=samples.norming, max_u=float(np.max(np.abs(u))))
    return u


def _stderr_floor(samples: SumSamples, height: float) -> float:
    # One sample's worth of resolution keeps stderr positive on empty cells.
    return SQRT_2PI * samples.norming * height / samples.count


def _warn_if_noisy(stderr: np.ndarray, count: int, target: Optional[float]) -> None:
    if target is None:
        return
    worst = float(stderr.max())
    if worst > target:
        required = int(np.ceil(count * (worst / target) ** 2))
        logger.warning("⚠️ Monte Carlo error above target", stderr=worst, target=target,
                       count=count, required_count=required)


def llt_scan(samples: SumSamples, h: WindowFunction, u_grid: Sequence[float],
             target_stderr: Optional[float] = DEFAULT_TARGET_STDERR) -> LLTReport:
    """
    √(2π) b Ê h(S_n - u) against exp(-u^2 / 2b^2) ∫h on a grid of shifts,
    with b the norming of the samples.
    """
    u = _check_grid(samples, u_grid)
    ordered = np.sort(samples.values)
    count = samples.count
    scale = SQRT_2PI * samples.norming

    lo = np.searchsorted(ordered, u - h.half_width, side="left")
    hi = np.searchsorted(ordered, u + h.half_width, side="right")
    mean = np.empty(u.size)
    second = np.empty(u.size)
    for i, (a, b) in enumerate(zip(lo, hi)):
        values = h(ordered[a:b] - u[i])
        mean[i] = values.sum() / count
        second[i] = (values * values).sum() / count
    var = np.clip(second - mean * mean, 0.0, None) * count / max(count - 1, 1)

    estimate = scale * mean
    stderr = np.maximum(scale * np.sqrt(var / count), _stderr_floor(samples, 1.0))
    predicted = np.exp(-u * u / (2.0 * samples.norming ** 2)) * h.integral
    _warn_if_noisy(stderr, count, target_stderr)
    return LLTReport(u_grid=u, estimate=estimate, predicted=predicted, stderr=stderr,
                     sup_abs_dev=float(np.max(np.abs(estimate - predicted))),
                     norming=samples.norming, count=count, kind="window",
                     extras={"window_integral": h.integral, "half_width": h.half_width})


def interval_scan(samples: SumSamples, c: float, d: float, u_grid: Sequence[float],
                  target_stderr: Optional[float] = None) -> LLTReport:
    """
    √(2π) b P̂(c + u <= S_n <= d + u) against (d - c) exp(-u^2 / 2b^2).

    extras["lebesgue_sup"] is the sup over the grid of the uniform form
    |√(2π) b P̂(c + u <= S_n <= d + u) - (d - c)|.
    """
    if not c < d:
        raise ModelError(f"interval needs c < d, got [{c}, {d}]")
    u = _check_grid(samples, u_grid)
    ordered = np.sort(samples.values)
    count = samples.count
    scale = SQRT_2PI * samples.norming

    inside = (np.searchsorted(ordered, d + u, side="right")
              - np.searchsorted(ordered, c + u, side="left"))
    p = inside / count
    estimate = scale * p
    stderr = np.maximum(scale * np.sqrt(p * (1.0 - p) / count), _stderr_floor(samples, 1.0))
    length = d - c
    predicted = length * np.exp(-u * u / (2.0 * samples.norming ** 2))
    inconclusive = bool(np.any(stderr > INCONCLUSIVE_FRACTION * length))
    if inconclusive:
        logger.warning("⚠️ Interval too short for the sample count, scan inconclusive",
                       length=length, count=count, max_stderr=float(stderr.max()))
    _warn_if_noisy(stderr, count, target_stderr)
    return LLTReport(u_grid=u, estimate=estimate, predicted=predicted, stderr=stderr,
                     sup_abs_dev=float(np.max(np.abs(estimate - predicted))),
                     norming=samples.norming, count=count, kind="interval", inconclusive=inconclusive,
                     extras={"c": c, "d": d, "lebesgue_sup": float(np.max(np.abs(estimate - length)))})


def clt_ks(samples: SumSamples) -> float:
    """sup_x |F̂(x) - Φ(x)| for the samples divided by their norming."""
    if not samples.norming > 0:
        raise ModelError(f"norming must be > 0, got {samples.norming}")
    return float(kstest(samples.standardized(), "norm").statistic)
