#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Continued-fraction digits under the Gauss measure.

Points are drawn from the Gauss law by inverse transform (its distribution
function is log2(1 + x)) and expanded by iterating the Gauss map
x -> 1/x - floor(1/x) in double precision. Each iteration costs a bit or two
of precision, so one orbit never yields more than MAX_DIGITS digits; longer
digit sums concatenate independent orbits, and joint statistics never
straddle two orbits.
"""

from dataclasses import dataclass, field
from typing import Dict, Literal, Optional, Tuple

import numpy as np
from scipy.stats import norm

from ..chain import ChainSpec, DiscreteLaw, DoeblinBounds, block_generator, make_chain
from ..chain.simulate import run_blocks
from ..common import BLOCK_SIZE, ModelError, get_logger
from ..llt import SumSamples, norming_sequence, sums_from_values
from ..mixing import JointDistribution, joint_from_counts

logger = get_logger(__name__)

MAX_DIGITS = 30
DEFAULT_CAP = 20
INFVAR_CAP = 1_000_000
MIN_CHAIN_SAMPLES = 100_000
DIGIT_CLIP = 2 ** 31 - 1
LN2 = float(np.log(2.0))

ObservableKind = Literal["infvar", "bounded"]


@dataclass(frozen=True)
class GaussSamples:
    """
    Attributes:
        x: starting points in (0, 1)
        digits: count x n_digits continued-fraction digits, 0 past an orbit's depth
        depth: number of valid digits per sample
        seed: generator seed
    """
    x: np.ndarray
    digits: np.ndarray
    depth: np.ndarray
    seed: int

    @property
    def count(self) -> int:
        return int(self.x.shape[0])

    @property
    def n_digits(self) -> int:
        return int(self.digits.shape[1])


@dataclass(frozen=True)
class TruncatedDigitChain:
    """
    Empirical lag-one chain on capped digits {1..cap, overflow}. The digit
    process is only approximately Markov at a finite cap.
    """
    cap: int
    requested_cap: int
    kernel: np.ndarray
    marginal: np.ndarray
    counts: np.ndarray
    sample_count: int
    ratio_range: Tuple[float, float]
    half_widths: Tuple[float, float]
    z: float
    notes: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def states(self) -> int:
        return self.cap + 1

    def labels(self):
        return [str(k) for k in range(1, self.cap + 1)] + [f">{self.cap}"]

    def to_chain(self) -> ChainSpec:
        """Stationary ChainSpec with the bounded observable log(min(digit, cap))."""
        return make_chain(self.marginal, self.kernel, bounded_observable(self.cap),
                          center=True, name=f"gauss-digits-K{self.cap}")


def _open_uniform(rng: np.random.Generator, size: int) -> np.ndarray:
    u = rng.random(size)
    zero = u == 0.0
    while zero.any():
        u[zero] = rng.random(int(zero.sum()))
        zero = u == 0.0
    return u


def _gauss_points(rng: np.random.Generator, size: int) -> np.ndarray:
    x = np.expm1(LN2 * _open_uniform(rng, size))
    return np.minimum(x, np.nextafter(1.0, 0.0))


def _gauss_map(x: np.ndarray):
    """One Gauss-map step; digit 0 and x = 0 once an orbit is exhausted."""
    alive = x > 0
    inv = np.divide(1.0, x, out=np.zeros_like(x), where=alive)
    digit = np.floor(inv)
    return digit, np.where(alive, inv - digit, 0.0)


def _check_depth(n_digits: int) -> None:
    if not 1 <= n_digits <= MAX_DIGITS:
        raise ModelError(f"n_digits must be in [1, {MAX_DIGITS}], got {n_digits}: "
                         "double-precision orbits are unreliable beyond that")


def sample_digits(count: int, n_digits: int, seed: int, threads: int = 0,
                  block_size: int = BLOCK_SIZE) -> GaussSamples:
    """Draw `count` Gauss-distributed points and their first n_digits digits."""
    _check_depth(n_digits)
    if count < 1:
        raise ModelError(f"sample count must be >= 1, got {count}")
    xs = np.empty(count)
    depth = np.empty(count, dtype=np.int32)
    digits = np.empty((count, n_digits), dtype=np.int32)

    def _work(index, start, stop):
        rng = block_generator(seed, index)
        x = _gauss_points(rng, stop - start)
        xs[start:stop] = x
        block = np.zeros((stop - start, n_digits), dtype=np.int32)
        for k in range(n_digits):
            digit, x = _gauss_map(x)
            block[:, k] = np.minimum(digit, DIGIT_CLIP)
        depth[start:stop] = (block > 0).sum(axis=1)
        return block

    run_blocks(count, block_size, threads, _work, digits, "digits")
    short = int((depth < n_digits).sum())
    if short:
        logger.warning("⚠️ Orbits exhausted before the requested depth", samples=short, n_digits=n_digits)
    logger.info("✅ Sampled Gauss digits", count=count, n_digits=n_digits, seed=seed)
    return GaussSamples(x=xs, digits=digits, depth=depth, seed=int(seed))


def digit_marginal(k, cap: Optional[int] = None) -> float:
    """
    P(digit = k) = log2((k+1)^2 / (k(k+2))); k = "overflow" gives
    P(digit > cap) = log2((cap+2) / (cap+1)).
    """
    if k == "overflow":
        if cap is None or cap < 1:
            raise ModelError("overflow mass needs a cap >= 1")
        return float(np.log2((cap + 2.0) / (cap + 1.0)))
    k = int(k)
    if k < 1:
        raise ModelError(f"digits are positive integers, got {k}")
    return float(np.log1p(1.0 / (k * (k + 2.0))) / LN2)


def digit_law(cap: int) -> np.ndarray:
    """Probabilities of 1..cap and the overflow state."""
    if cap < 1:
        raise ModelError(f"cap must be >= 1, got {cap}")
    k = np.arange(1, cap + 1, dtype=float)
    probs = np.log1p(1.0 / (k * (k + 2.0))) / LN2
    return np.append(probs, digit_marginal("overflow", cap))


def bounded_observable(cap: int) -> np.ndarray:
    """log(min(digit, cap)) on states 1..cap, overflow."""
    k = np.arange(1, cap + 2, dtype=float)
    return np.log(np.minimum(k, cap))


def infvar_observable(cap: int = INFVAR_CAP) -> np.ndarray:
    """
    (-1)^k sqrt(k) on states 1..cap, the overflow state taking the cap's
    value, centered by the exact mean under the capped digit law.
    """
    k = np.arange(1, cap + 2, dtype=float)
    k[-1] = cap
    g = np.where(k % 2 == 0, 1.0, -1.0) * np.sqrt(k)
    return g - digit_law(cap) @ g


def infvar_law(cap: int = INFVAR_CAP) -> DiscreteLaw:
    return DiscreteLaw(infvar_observable(cap), digit_law(cap))


def infvar_tail_sums(x) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exact P(|X| > x) and H(x) = E(X^2 1{|X| <= x}) for the uncapped digit
    observable X = (-1)^k sqrt(k), without enumerating atoms.

    P(digit > K) = log2(1 + 1/(K + 1)) telescopes, and summation by parts
    gives Σ_{k<=K} k P(digit = k) = log2(K + 1) - K P(digit > K), K = floor(x^2).
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ModelError("truncation levels must be >= 0")
    K = np.floor(x * x)
    tail = np.log1p(1.0 / (K + 1.0)) / LN2
    return tail, np.log1p(K) / LN2 - K * tail


def _capped(digits: np.ndarray, cap: int) -> np.ndarray:
    """State index 0..cap (cap is overflow)."""
    return np.minimum(digits, cap + 1) - 1


def _pair_counts(samples: GaussSamples, cap: int, lag: int) -> np.ndarray:
    if not 1 <= lag < samples.n_digits:
        raise ModelError(f"lag must be in [1, {samples.n_digits - 1}], got {lag}")
    size = cap + 1
    counts = np.zeros((size, size))
    for k in range(samples.n_digits - lag):
        valid = samples.depth > k + lag
        left = _capped(samples.digits[valid, k], cap)
        right = _capped(samples.digits[valid, k + lag], cap)
        counts += np.bincount(left * size + right, minlength=size * size).reshape(size, size)
    return counts


def empirical_lag_joint(samples: GaussSamples, cap: int = DEFAULT_CAP, lag: int = 1) -> JointDistribution:
    """Joint law of (capped digit_k, capped digit_{k+lag}) pooled over positions of each orbit."""
    return joint_from_counts(_pair_counts(samples, cap, lag))


def _pool(counts: np.ndarray, cap: int) -> np.ndarray:
    """Merge states cap..end into a single overflow state."""
    head = counts[:cap, :cap]
    right = counts[:cap, cap:].sum(axis=1, keepdims=True)
    bottom = counts[cap:, :cap].sum(axis=0, keepdims=True)
    corner = counts[cap:, cap:].sum(keepdims=True)
    return np.block([[head, right], [bottom, corner]])


def empirical_chain(samples: GaussSamples, cap: int = DEFAULT_CAP,
                    alpha: float = 0.05) -> Tuple[TruncatedDigitChain, DoeblinBounds]:
    """
    Lag-one kernel of capped digits and the Doeblin constants a, b estimated
    as min/max of Q̂(x, y) / P̂(y), with delta-method half-widths at a
    Bonferroni-adjusted level over all cells.
    """
    if cap < 1:
        raise ModelError(f"cap must be >= 1, got {cap}")
    notes = []
    if samples.count < MIN_CHAIN_SAMPLES:
        notes.append(f"only {samples.count} samples, Doeblin estimates are unreliable")
        logger.warning("⚠️ Few samples for the empirical chain", count=samples.count)

    counts = _pair_counts(samples, cap, 1)
    effective = cap
    while effective > 1 and np.any(counts == 0):
        effective -= 1
        counts = _pool(counts, effective)
    if effective < cap:
        notes.append(f"empty cells: cap pooled from {cap} to {effective}")
        logger.warning("⚠️ Empty cells, widened pooling", requested_cap=cap, cap=effective)
    if np.any(counts == 0):
        raise ModelError("digit pairs too sparse for an empirical kernel")

    total = counts.sum()
    row = counts.sum(axis=1)
    Q = counts / row[:, None]
    P = counts.sum(axis=0) / total
    ratio = Q / P[None, :]
    var_Q = Q * (1.0 - Q) / row[:, None]
    var_P = P * (1.0 - P) / total
    ratio_sd = ratio * np.sqrt(var_Q / Q ** 2 + (var_P / P ** 2)[None, :])
    z = float(norm.ppf(1.0 - alpha / (2.0 * ratio.size)))

    ia = np.unravel_index(np.argmin(ratio), ratio.shape)
    ib = np.unravel_index(np.argmax(ratio), ratio.shape)
    a, b = float(ratio[ia]), float(ratio[ib])
    chain = TruncatedDigitChain(cap=effective, requested_cap=cap, kernel=Q, marginal=P, counts=counts,
                                sample_count=samples.count, ratio_range=(a, b),
                                half_widths=(z * float(ratio_sd[ia]), z * float(ratio_sd[ib])),
                                z=z, notes=tuple(notes))
    bounds = DoeblinBounds(a=a, b=b, gamma=a ** 4 / b,
                           attained_at={"a": (2, int(ia[0]), int(ia[1])), "b": (2, int(ib[0]), int(ib[1]))})
    logger.info("✅ Estimated digit chain", cap=effective, a=a, b=b, gamma=bounds.gamma)
    return chain, bounds


def digit_sums(count: int, n: int, seed: int, observable: ObservableKind = "infvar",
               cap: Optional[int] = None, threads: int = 0, block_size: int = BLOCK_SIZE) -> SumSamples:
    """
    Σ_{k<=n} g(digit_k) over independent orbits of MAX_DIGITS digits.

    "infvar" uses (-1)^k sqrt(k) normed by b_n of its capped law;
    "bounded" uses log(min(digit, cap)) normed by the pooled standard
    deviation of the per-orbit block sums.
    """
    if n < 1 or count < 1:
        raise ModelError(f"need n >= 1 and count >= 1, got n={n}, count={count}")
    if observable == "infvar":
        cap = INFVAR_CAP if cap is None else cap
        g = infvar_observable(cap)
    elif observable == "bounded":
        cap = DEFAULT_CAP if cap is None else cap
        g = bounded_observable(cap)
        g = g - digit_law(cap) @ g
    else:
        raise ModelError(f"unknown digit observable '{observable}'")

    segments = -(-n // MAX_DIGITS)
    lengths = np.full(segments, MAX_DIGITS)
    lengths[-1] = n - MAX_DIGITS * (segments - 1)
    sums = np.empty(count)
    block_moments: Dict[int, np.ndarray] = {}

    def _work(index, start, stop):
        rng = block_generator(seed, index)
        size = stop - start
        x = _gauss_points(rng, size * segments)
        totals = np.zeros(size * segments)
        seg_len = np.tile(lengths, size)
        for k in range(MAX_DIGITS):
            digit, x = _gauss_map(x)
            active = (k < seg_len) & (digit > 0)
            state = (np.minimum(digit, cap + 1) - 1).astype(np.int64)
            totals += np.where(active, g[np.clip(state, 0, cap)], 0.0)
        per_block = totals.reshape(size, segments)
        block_moments[index] = np.stack([per_block.sum(axis=0), (per_block ** 2).sum(axis=0)])
        return per_block.sum(axis=1)

    run_blocks(count, block_size, threads, _work, sums, "digit sums")

    if observable == "infvar":
        norming = float(norming_sequence(infvar_law(cap), [n]).b[0])
    else:
        moments = sum(block_moments[i] for i in sorted(block_moments))
        mean = moments[0] / count
        block_var = moments[1] / count - mean ** 2
        norming = float(np.sqrt(block_var.sum()))
    logger.info("✅ Digit sums", observable=observable, n=n, count=count, norming=norming)
    return sums_from_values(sums, n=n, norming=norming, mode=f"digits-{observable}",
                            provenance={"chain": "gauss-digits", "seed": int(seed), "cap": cap,
                                        "observable": observable})
