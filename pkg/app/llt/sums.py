#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Monte Carlo partial sums for the local limit scans: plain sums, weighted
sums a_{n,k} X_k and linear processes Y_k = Σ_i a_i X_{k+i}.

A linear-process sum is rewritten as S_n = Σ_{j>=2} b_{n,j} X_j with
b_{n,j} = A_{j-1} - A_{j-n-1}, truncated at j <= n + K_n, so every mode
reduces to a weighted sum over one simulated path.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Literal, Optional, Sequence

import numpy as np

from ..chain import ChainSpec, effective_observables, exact_moments, marginals, simulate_sums, with_observables
from ..common import BLOCK_SIZE, ModelError, get_logger

logger = get_logger(__name__)

SumMode = Literal["plain", "weighted", "linear", "infvar"]

TRUNCATION_TOL = 1e-9


@dataclass(frozen=True)
class LinearProcessSpec:
    """
    Coefficients for the weighted and linear-process modes.

    Attributes:
        coefficients: a_1, a_2, ... supplied finitely
        tail_bound: bound on Σ |a_i| over the indices not supplied
        truncation: K_n override, None picks the default rule
        weights: a_{n,k} for weighted mode, cycled to length n
        m, M: bounds checked against |a_{n,k}| (weighted) or |A_j| (linear)
    """
    coefficients: Sequence[float] = ()
    tail_bound: float = 0.0
    truncation: Optional[int] = None
    weights: Sequence[float] = ()
    m: float = 0.0
    M: float = float("inf")

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(a) for a in self.coefficients))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if self.tail_bound < 0 or not np.isfinite(self.tail_bound):
            raise ModelError(f"tail bound must be finite and >= 0, got {self.tail_bound}")
        if not np.all(np.isfinite(self.coefficients)) or not np.all(np.isfinite(self.weights)):
            raise ModelError("coefficients and weights must be finite")

    @classmethod
    def geometric(cls, ratio: float = 0.5, terms: int = 64, **kwargs) -> "LinearProcessSpec":
        """a_i = ratio^i for i <= terms, with the exact geometric tail bound."""
        if not 0 < abs(ratio) < 1:
            raise ModelError(f"geometric ratio must satisfy 0 < |r| < 1, got {ratio}")
        coefficients = [ratio ** i for i in range(1, terms + 1)]
        tail = abs(ratio) ** (terms + 1) / (1.0 - abs(ratio))
        return cls(coefficients=coefficients, tail_bound=tail, **kwargs)

    @property
    def partials(self) -> np.ndarray:
        """A_1, A_2, ..."""
        return np.cumsum(self.coefficients)

    @property
    def limit(self) -> float:
        """A = Σ a_i over the supplied coefficients (the tail is below tail_bound)."""
        return float(np.sum(self.coefficients))

    def tail_sum(self, K: int) -> float:
        """Σ_{l >= K} |a_l|, using tail_bound beyond the supplied list."""
        a = np.abs(np.asarray(self.coefficients))
        return float(a[max(K - 1, 0):].sum()) + self.tail_bound

    def truncation_for(self, n: int) -> int:
        """
        K_n: the override, else max(n, K) with K the first index where
        n^{3/2} Σ_{l >= K} |a_l| <= TRUNCATION_TOL.
        """
        if self.truncation is not None:
            if self.truncation < n:
                raise ModelError(f"truncation K_n = {self.truncation} must be >= n = {n}")
            K = self.truncation
        else:
            K = next((k for k in range(1, len(self.coefficients) + 2)
                      if n ** 1.5 * self.tail_sum(k) <= TRUNCATION_TOL), None)
            if K is None:
                K = len(self.coefficients) + 1
            K = max(n, K)
        if n ** 1.5 * self.tail_sum(K) > TRUNCATION_TOL:
            logger.warning("⚠️ Truncation tail bound not met", n=n, K=K,
                           scaled_tail=n ** 1.5 * self.tail_sum(K))
        return K

    def coefficient(self, i: int) -> float:
        return self.coefficients[i - 1] if 1 <= i <= len(self.coefficients) else 0.0

    def b_coefficients(self, n: int, K: Optional[int] = None) -> np.ndarray:
        """
        b_{n,j} for j = 1 .. n + K (b_{n,1} = 0), the weight of X_j in S_n.
        """
        K = self.truncation_for(n) if K is None else K
        length = n + K
        a = np.array([self.coefficient(i) for i in range(1, length + 1)])
        A = np.concatenate([[0.0], np.cumsum(a)])  # A[j] = A_j, A_0 = 0
        j = np.arange(1, length + 1)
        upper = A[j - 1]
        lower = A[np.maximum(j - n - 1, 0)]
        return upper - lower

    def check_linear(self) -> None:
        if not self.coefficients:
            raise ModelError("linear mode needs coefficients a_i")
        inf_partial = float(np.min(np.abs(self.partials)))
        floor = max(self.m, 0.0)
        if inf_partial <= floor or inf_partial <= 0:
            raise ModelError(f"inf_j |A_j| = {inf_partial:.6g} must exceed m = {floor:.6g}")

    def weights_for(self, n: int) -> np.ndarray:
        if not self.weights:
            raise ModelError("weighted mode needs weights a_{n,k}")
        w = np.resize(np.asarray(self.weights, dtype=float), n)
        outside = np.flatnonzero((np.abs(w) < self.m) | (np.abs(w) > self.M))
        if outside.size:
            k = int(outside[0]) + 1
            raise ModelError(f"weight a_(n,{k}) = {w[k - 1]:.6g} outside [{self.m:.6g}, {self.M:.6g}]")
        if self.m <= 0 and np.any(w == 0):
            raise ModelError("weights must be bounded away from 0")
        return w


@dataclass(frozen=True)
class SumSamples:
    """Monte Carlo draws of S_n with the norming used by the scans."""
    values: np.ndarray
    n: int
    mode: str
    norming: float
    provenance: Dict[str, Any] = field(default_factory=dict)
    alt_norming: Dict[str, float] = field(default_factory=dict)

    @property
    def count(self) -> int:
        return int(self.values.shape[0])

    def standardized(self) -> np.ndarray:
        return self.values / self.norming

    def mean_zscore(self) -> float:
        """Sample mean over its standard error."""
        sd = float(np.std(self.values, ddof=1)) if self.count > 1 else 0.0
        if sd == 0:
            return 0.0
        return float(np.mean(self.values)) / (sd / np.sqrt(self.count))

    def renormed(self, norming: float) -> "SumSamples":
        return SumSamples(values=self.values, n=self.n, mode=self.mode, norming=norming,
                          provenance=self.provenance, alt_norming=self.alt_norming)


def sums_from_values(values, n: int, norming: float, mode: str = "plain",
                     provenance: Optional[Dict[str, Any]] = None,
                     alt_norming: Optional[Dict[str, float]] = None) -> SumSamples:
    """Wrap externally generated draws (digit sums, synthetic Gaussians)."""
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise ModelError("no samples")
    if not norming > 0:
        raise ModelError(f"norming must be > 0, got {norming}")
    return SumSamples(values=values, n=int(n), mode=mode, norming=float(norming),
                      provenance=dict(provenance or {}), alt_norming=dict(alt_norming or {}))


def _weighted_sigma(chain: ChainSpec, n: int, weights: np.ndarray) -> float:
    h = effective_observables(chain, marginals(chain, n))
    weighted = with_observables(chain, weights[:, None] * h, center=False)
    return float(np.sqrt(exact_moments(weighted, n).sigma_sq))


def build_sums(chain: ChainSpec, n: int, count: int, seed: int, mode: SumMode = "plain",
               lp: Optional[LinearProcessSpec] = None, threads: int = 0,
               block_size: int = BLOCK_SIZE) -> SumSamples:
    """
    Args:
        chain: chain to simulate
        n: number of summands
        count: Monte Carlo paths
        seed: 64-bit seed, blocks keyed by (seed, block index)
        mode: plain, weighted or linear
        lp: weights (weighted) or coefficients (linear)

    Returns:
        SumSamples normed by the exact sigma_n of the simulated sum. Linear
        mode also records v_n |A| in alt_norming.
    """
    provenance = {"chain": chain.name, "seed": int(seed), "mode": mode}
    if mode == "plain":
        values = simulate_sums(chain, n, count, seed, threads=threads, block_size=block_size)
        norming = float(np.sqrt(exact_moments(chain, n).sigma_sq))
        alt = {}
    elif mode == "weighted":
        if lp is None:
            raise ModelError("weighted mode needs a LinearProcessSpec with weights")
        w = lp.weights_for(n)
        values = simulate_sums(chain, n, count, seed, weights=w, threads=threads, block_size=block_size)
        norming = _weighted_sigma(chain, n, w)
        alt = {}
    elif mode == "linear":
        if lp is None:
            raise ModelError("linear mode needs a LinearProcessSpec with coefficients")
        lp.check_linear()
        K = lp.truncation_for(n)
        b = lp.b_coefficients(n, K)
        values = simulate_sums(chain, n + K, count, seed, weights=b, threads=threads, block_size=block_size)
        norming = _weighted_sigma(chain, n + K, b)
        v_n = float(np.sqrt(exact_moments(chain, n).sigma_sq))
        alt = {"v_n_abs_A": v_n * abs(lp.limit), "sigma_filtered": norming}
        provenance["truncation"] = K
        logger.info("⚠️ Linear-process norming is ambiguous, reporting both", sigma_filtered=norming,
                    v_n_abs_A=alt["v_n_abs_A"])
    else:
        raise ModelError(f"unknown sum mode '{mode}'")
    if not norming > 0:
        raise ModelError(f"exact norming is {norming:.6g}: degenerate sum")
    return SumSamples(values=values, n=n, mode=mode, norming=norming, provenance=provenance, alt_norming=alt)
