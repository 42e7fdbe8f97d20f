#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Lower/upper psi-mixing coefficients and maximal correlation for joint laws of
two finite-valued variables, plus lag joints of a chain.
"""

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import svdvals

from ..chain import ChainSpec, marginals
from ..common import ModelError, STOCHASTIC_TOL, ZERO_MASS, get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class JointDistribution:
    mass: np.ndarray

    def __post_init__(self):
        mass = np.array(self.mass, dtype=float)
        if mass.ndim != 2 or mass.size == 0:
            raise ModelError("joint mass must be a nonempty matrix")
        if np.any(mass < 0):
            raise ModelError("joint mass has negative entries")
        if abs(mass.sum() - 1.0) > STOCHASTIC_TOL:
            raise ModelError(f"joint mass sums to {mass.sum():.15g}, expected 1")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)

    @property
    def left_size(self) -> int:
        return self.mass.shape[0]

    @property
    def right_size(self) -> int:
        return self.mass.shape[1]

    @property
    def left_marginal(self) -> np.ndarray:
        return self.mass.sum(axis=1)

    @property
    def right_marginal(self) -> np.ndarray:
        return self.mass.sum(axis=0)

    def support(self) -> Tuple[np.ndarray, np.ndarray]:
        """Indices of atoms with positive marginal mass on each side."""
        return (np.flatnonzero(self.left_marginal > ZERO_MASS),
                np.flatnonzero(self.right_marginal > ZERO_MASS))

    @property
    def degenerate(self) -> bool:
        left, right = self.support()
        return left.size < 2 or right.size < 2


@dataclass(frozen=True)
class MixingCoeffs:
    psi_lower: float
    psi_upper: float
    rho: float
    degenerate: bool = False
    dropped: Dict[str, List[int]] = field(default_factory=dict)

    @property
    def psi(self) -> float:
        return max(self.psi_upper - 1.0, 1.0 - self.psi_lower)

    @property
    def bradley_gap(self) -> float:
        return (1.0 - self.psi_lower) - self.rho


def joint_from_counts(counts) -> JointDistribution:
    """Empirical joint law from a contingency table."""
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total <= 0:
        raise ModelError("contingency table is empty")
    return JointDistribution(counts / total)


def lag_joint(chain: ChainSpec, m: int, k: int, n: Optional[int] = None) -> JointDistribution:
    """
    Joint law of (ξ_m, ξ_{m+k}).

    Args:
        m: start index (>= 1)
        k: lag (>= 1)
        n: optional horizon the pair must fit in
    """
    if m < 1 or k < 1:
        raise ModelError(f"lag joint needs m >= 1 and k >= 1, got m={m}, k={k}")
    if n is not None and m + k > n:
        raise ModelError(f"m + k = {m + k} exceeds horizon n = {n}")
    P_m = marginals(chain, m + k).at(m)
    product = np.eye(chain.size)
    for j in range(m + 1, m + k + 1):
        product = product @ chain.kernel(j)
    mass = P_m[:, None] * product
    # Rows of `product` sum to 1 only up to rounding.
    return JointDistribution(mass / mass.sum())


def psi_coeffs(joint: JointDistribution) -> Tuple[float, float]:
    """Atomwise min/max of p(x, y) / (p_X(x) p_Y(y)) over positive-mass atoms."""
    if joint.degenerate:
        logger.warning("⚠️ Degenerate marginal, psi coefficients set to 1")
        return 1.0, 1.0
    left, right = joint.support()
    pX, pY = joint.left_marginal[left], joint.right_marginal[right]
    ratio = joint.mass[np.ix_(left, right)] / np.outer(pX, pY)
    return float(ratio.min()), float(ratio.max())


def rho_coeff(joint: JointDistribution) -> float:
    """Second singular value of p / sqrt(p_X p_Y), clamped to [0, 1]."""
    if joint.degenerate:
        logger.warning("⚠️ Degenerate marginal, maximal correlation set to 0")
        return 0.0
    left, right = joint.support()
    sX = np.sqrt(joint.left_marginal[left])
    sY = np.sqrt(joint.right_marginal[right])
    B = joint.mass[np.ix_(left, right)] / np.outer(sX, sY)
    # Remove the top pair (sqrt marginals, singular value 1).
    deflated = B - np.outer(sX, sY)
    return float(np.clip(svdvals(deflated)[0], 0.0, 1.0))


def bradley_gap(joint: JointDistribution) -> float:
    """(1 - psi') - rho, nonnegative up to rounding."""
    psi_lower, _ = psi_coeffs(joint)
    return (1.0 - psi_lower) - rho_coeff(joint)


def mixing_coeffs(joint: JointDistribution) -> MixingCoeffs:
    left, right = joint.support()
    dropped = {
        "left": [int(i) for i in np.setdiff1d(np.arange(joint.left_size), left)],
        "right": [int(j) for j in np.setdiff1d(np.arange(joint.right_size), right)],
    }
    psi_lower, psi_upper = psi_coeffs(joint)
    return MixingCoeffs(psi_lower=psi_lower, psi_upper=psi_upper, rho=rho_coeff(joint),
                        degenerate=joint.degenerate, dropped=dropped)


def exhaustive_psi(joint: JointDistribution) -> Tuple[float, float]:
    """
    Extrema of P(A ∩ B) / (P(A) P(B)) over every pair of events with positive
    probability. Exponential in the sizes; meant for checks on small joints.
    """
    if joint.left_size > 10 or joint.right_size > 10:
        raise ModelError("exhaustive enumeration limited to 10 atoms per side")
    lo, hi = np.inf, -np.inf
    pX, pY = joint.left_marginal, joint.right_marginal

    def _events(size):
        for r in range(1, size + 1):
            yield from itertools.combinations(range(size), r)

    for A in _events(joint.left_size):
        PA = pX[list(A)].sum()
        if PA <= ZERO_MASS:
            continue
        row = joint.mass[list(A)].sum(axis=0)
        for B in _events(joint.right_size):
            PB = pY[list(B)].sum()
            if PB <= ZERO_MASS:
                continue
            ratio = row[list(B)].sum() / (PA * PB)
            lo, hi = min(lo, ratio), max(hi, ratio)
    return float(lo), float(hi)


@dataclass(frozen=True)
class LagProfile:
    lag: int
    psi_lower: float
    psi_upper: float
    rho: float
    bradley_gap: float
    per_start: List[Tuple[int, MixingCoeffs]]


def mixing_profile(chain: ChainSpec, n: int, lags: Sequence[int]) -> List[LagProfile]:
    """
    Per-lag coefficients over start indices m = 1..n-k: min psi', max psi*,
    max rho and the smallest Bradley gap. Truncates inf/sup over m at horizon n.
    """
    profiles = []
    for k in lags:
        if k < 1 or k >= n:
            raise ModelError(f"lag {k} does not fit in horizon n = {n}")
        rows = [(m, mixing_coeffs(lag_joint(chain, m, k, n))) for m in range(1, n - k + 1)]
        profiles.append(LagProfile(
            lag=k,
            psi_lower=min(c.psi_lower for _, c in rows),
            psi_upper=max(c.psi_upper for _, c in rows),
            rho=max(c.rho for _, c in rows),
            bradley_gap=min(c.bradley_gap for _, c in rows),
            per_start=rows,
        ))
    return profiles
