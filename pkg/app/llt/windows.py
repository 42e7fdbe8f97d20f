#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Compactly supported test functions h for the local limit scans.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.integrate import quad

from ..common import ModelError

WINDOW_ALIASES = {
    "tri": "triangular",
    "triangular": "triangular",
    "epa": "epanechnikov",
    "epanechnikov": "epanechnikov",
}


@dataclass(frozen=True)
class WindowFunction:
    """Height-one window on [-w, w]: triangular 1 - |x|/w or Epanechnikov 1 - (x/w)^2."""
    kind: Literal["triangular", "epanechnikov"]
    half_width: float

    def __post_init__(self):
        if self.kind not in ("triangular", "epanechnikov"):
            raise ModelError(f"unknown window '{self.kind}'")
        if not self.half_width > 0:
            raise ModelError(f"window half-width must be > 0, got {self.half_width}")

    @classmethod
    def from_name(cls, name: str, half_width: float) -> "WindowFunction":
        try:
            return cls(WINDOW_ALIASES[name.lower()], float(half_width))
        except KeyError:
            raise ModelError(f"unknown window '{name}', expected one of {sorted(WINDOW_ALIASES)}")

    @property
    def integral(self) -> float:
        if self.kind == "triangular":
            return self.half_width
        return 4.0 * self.half_width / 3.0

    def __call__(self, x):
        r = np.abs(np.asarray(x, dtype=float)) / self.half_width
        if self.kind == "triangular":
            return np.clip(1.0 - r, 0.0, None)
        return np.clip(1.0 - r * r, 0.0, None)

    def quadrature_integral(self) -> float:
        value, _ = quad(lambda t: float(self(t)), -self.half_width, self.half_width,
                        points=[0.0], epsabs=1e-13, epsrel=1e-13)
        return value
