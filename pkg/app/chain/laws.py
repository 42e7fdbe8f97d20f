#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Finite real distributions with fast truncated-moment queries.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..common import ModelError


@dataclass(frozen=True)
class DiscreteLaw:
    """
    Atoms `values` with probabilities `probs`.

    Queries are evaluated through cumulative sums over atoms sorted by |value|,
    so H(x) = E(X^2 1{|X| <= x}) costs one binary search.
    """
    values: np.ndarray
    probs: np.ndarray
    _abs_sorted: np.ndarray = field(init=False, repr=False)
    _cum_p: np.ndarray = field(init=False, repr=False)
    _cum_pv: np.ndarray = field(init=False, repr=False)
    _cum_pv2: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        probs = np.asarray(self.probs, dtype=float).ravel()
        if values.shape != probs.shape or values.size == 0:
            raise ModelError("law needs equally many values and probabilities")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
            raise ModelError(f"law probabilities must be >= 0 and sum to 1 (sum {probs.sum():.12g})")
        order = np.argsort(np.abs(values), kind="stable")
        v, p = values[order], probs[order]
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "_abs_sorted", np.abs(v))
        object.__setattr__(self, "_cum_p", np.concatenate([[0.0], np.cumsum(p)]))
        object.__setattr__(self, "_cum_pv", np.concatenate([[0.0], np.cumsum(p * v)]))
        object.__setattr__(self, "_cum_pv2", np.concatenate([[0.0], np.cumsum(p * v * v)]))

    @classmethod
    def from_sample(cls, sample) -> "DiscreteLaw":
        values, counts = np.unique(np.asarray(sample, dtype=float), return_counts=True)
        return cls(values, counts / counts.sum())

    @property
    def mean(self) -> float:
        return float(self.probs @ self.values)

    @property
    def second_moment(self) -> float:
        return float(self.probs @ (self.values ** 2))

    @property
    def max_abs(self) -> float:
        return float(self._abs_sorted[-1])

    def centered(self) -> "DiscreteLaw":
        return DiscreteLaw(self.values - self.mean, self.probs)

    def _index(self, x):
        return np.searchsorted(self._abs_sorted, x, side="right")

    def truncated_second_moment(self, x):
        """H(x) = E(X^2 1{|X| <= x})."""
        return self._cum_pv2[self._index(x)]

    def truncated_mean(self, x):
        """E(X 1{|X| <= x})."""
        return self._cum_pv[self._index(x)]

    def inner_mass(self, x):
        """P(|X| <= x)."""
        return self._cum_p[self._index(x)]

    def tail_prob(self, x):
        """P(|X| > x)."""
        return np.clip(1.0 - self._cum_p[self._index(x)], 0.0, 1.0)

    def tail_second_moment(self, x):
        """E(X^2 1{|X| > x})."""
        return self._cum_pv2[-1] - self._cum_pv2[self._index(x)]

    def truncated_variance(self, x):
        """E[(X - E(X 1{|X|<=x}))^2 1{|X| <= x}]."""
        m = self.truncated_mean(x)
        return self.truncated_second_moment(x) - 2.0 * m * m + m * m * self.inner_mass(x)

    def symmetrized(self, max_atoms: Optional[int] = 4096) -> "DiscreteLaw":
        """Law of X - X* for an independent copy X*, as an exact self-convolution."""
        if max_atoms is not None and self.values.size > max_atoms:
            raise ModelError(f"symmetrization limited to {max_atoms} atoms, law has {self.values.size}")
        diffs = (self.values[:, None] - self.values[None, :]).ravel()
        weights = (self.probs[:, None] * self.probs[None, :]).ravel()
        atoms, inverse = np.unique(diffs, return_inverse=True)
        mass = np.bincount(inverse.ravel(), weights=weights)
        return DiscreteLaw(atoms, mass / mass.sum())
