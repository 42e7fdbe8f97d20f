#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Characteristic functions of additive functionals through complex transfer
operators T_{u,k}(x, y) = exp(i u h_k(y)) Q_k(x, y).

Step 1 uses the virtual kernel Q_1(x, .) = P_1, so T_1 has identical rows.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..chain import ChainSpec, MarginalSequence, doeblin_bounds, effective_observables, marginals
from ..common import BoundViolation, INEQUALITY_TOL, ModelError, ZERO_MASS, get_logger

logger = get_logger(__name__)

# Complex entries materialized at once when tabulating f_k(u).
_CHUNK_ELEMENTS = 4_000_000


@dataclass(frozen=True)
class CharFnValue:
    u: float
    value: complex


@dataclass(frozen=True)
class TransferMatrix:
    u: float
    k: int
    entries: np.ndarray


@dataclass
class BoundReport:
    """Nagaev product bound and operator pair norms at one frequency."""
    u: float
    n: int
    gamma: float
    phi: complex
    exact_abs4: float
    step_abs_sq: np.ndarray
    product_bound: float
    exp_relaxation: float
    pair_norms: np.ndarray
    pair_bounds: np.ndarray
    odd_pair_product: float = 1.0
    even_pair_product: float = 1.0
    odd_pair_bound: float = 1.0
    even_pair_bound: float = 1.0
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _kernel(chain: ChainSpec, marg: MarginalSequence, k: int) -> np.ndarray:
    if k == 1:
        return np.tile(marg.at(1), (chain.size, 1))
    return chain.kernel(k)


def step_charfn_grid(chain: ChainSpec, n: int, u_grid: Sequence[float],
                     marg: Optional[MarginalSequence] = None) -> np.ndarray:
    """Matrix f[k-1, j] = f_k(u_j) = Σ_y P_k(y) exp(i u_j h_k(y))."""
    marg = marg or marginals(chain, n)
    h = effective_observables(chain, marg)
    u = np.atleast_1d(np.asarray(u_grid, dtype=float))
    out = np.empty((h.shape[0], u.size), dtype=complex)
    chunk = max(1, _CHUNK_ELEMENTS // max(h.size, 1))
    for start in range(0, u.size, chunk):
        part = u[start:start + chunk]
        phases = np.exp(1j * part[None, :, None] * h[:, None, :])
        out[:, start:start + chunk] = np.einsum("ks,kus->ku", marg.marginals, phases)
    return out


def step_charfn(chain: ChainSpec, k: int, u: float,
                marg: Optional[MarginalSequence] = None) -> CharFnValue:
    """f_k(u)."""
    if k < 1:
        raise ModelError(f"step index starts at 1, got {k}")
    marg = marg or marginals(chain, k)
    return CharFnValue(u=u, value=complex(step_charfn_grid(chain, k, [u], marg)[k - 1, 0]))


def transfer_matrix(chain: ChainSpec, k: int, u: float,
                    marg: Optional[MarginalSequence] = None) -> TransferMatrix:
    """T_{u,k}; k = 1 uses the virtual kernel."""
    if k < 1:
        raise ModelError(f"step index starts at 1, got {k}")
    marg = marg or marginals(chain, k)
    h = effective_observables(chain, marg)[k - 1]
    entries = _kernel(chain, marg, k) * np.exp(1j * u * h)[None, :]
    return TransferMatrix(u=u, k=k, entries=entries)


def sup_norm(matrix, row_mass: Optional[np.ndarray] = None) -> float:
    """
    Operator norm on bounded functions: largest absolute row sum, over rows
    whose conditioning mass is positive when `row_mass` is given.
    """
    entries = matrix.entries if isinstance(matrix, TransferMatrix) else np.asarray(matrix)
    row_sums = np.abs(entries).sum(axis=1)
    if row_mass is not None:
        row_sums = row_sums[np.asarray(row_mass) > ZERO_MASS]
    return float(row_sums.max()) if row_sums.size else 0.0


def charfn_grid(chain: ChainSpec, n: int, u_grid: Sequence[float],
                marg: Optional[MarginalSequence] = None) -> np.ndarray:
    """
    φ_n(u) on a grid, by one backward pass T_2 ∘ ... ∘ T_n (1) vectorized
    over u (cost O(n size^2) per frequency).
    """
    if n < 1:
        raise ModelError(f"chain length must be >= 1, got {n}")
    marg = marg or marginals(chain, n)
    h = effective_observables(chain, marg)
    u = np.atleast_1d(np.asarray(u_grid, dtype=float))
    v = np.ones((u.size, chain.size), dtype=complex)
    for k in range(n, 1, -1):
        # (T_k v)(x) = Σ_y Q_k(x, y) e^{iu h_k(y)} v(y)
        v = (np.exp(1j * u[:, None] * h[k - 1][None, :]) * v) @ chain.kernel(k).T
    return (np.exp(1j * u[:, None] * h[0][None, :]) * v) @ marg.at(1)


def exact_charfn(chain: ChainSpec, n: int, u: float) -> CharFnValue:
    """φ_n(u) = E exp(i u S_n)."""
    return CharFnValue(u=u, value=complex(charfn_grid(chain, n, [u])[0]))


def nagaev_bound(chain: ChainSpec, n: int, u: float, gamma: Optional[float] = None,
                 strict: bool = False, tol: float = INEQUALITY_TOL) -> BoundReport:
    """
    Check |φ_n(u)|^4 <= Π_j [1 - γ/2 (1 - |f_j(u)|^2)] and, for every
    adjacent pair, ||T_{k-1} ∘ T_k||^2 <= 1 - γ/2 (1 - |f_{k-1}(u)|^2). The pairs
    starting at odd and at even k are also checked as two products, each
    against the product of its own factors.

    Args:
        gamma: override for the Doeblin constant (fault injection); computed when None
        strict: raise BoundViolation instead of only recording violations

    Returns:
        BoundReport with the exponential relaxation exp(-(γ/8) Σ (1 - |f_j|^2))
    """
    marg = marginals(chain, n)
    if gamma is None:
        gamma = doeblin_bounds(chain, n).gamma
    if gamma <= 0:
        raise ModelError("γ = 0: Doeblin condition fails, the product bound is vacuous")

    step_abs_sq = np.abs(step_charfn_grid(chain, n, [u], marg)[:, 0]) ** 2
    phi = complex(charfn_grid(chain, n, [u], marg)[0])
    exact_abs4 = abs(phi) ** 4
    factors = 1.0 - 0.5 * gamma * (1.0 - step_abs_sq)
    product_bound = float(np.prod(factors))
    exp_relaxation = float(np.exp(-(gamma / 8.0) * np.sum(1.0 - step_abs_sq)))

    pair_norms = np.empty(max(n - 1, 0))
    pair_bounds = factors[:-1].copy()
    previous = transfer_matrix(chain, 1, u, marg).entries
    for k in range(2, n + 1):
        current = transfer_matrix(chain, k, u, marg).entries
        # Rows of T_{k-1} are indexed by ξ_{k-2}; the virtual ξ_0 row set is all rows.
        row_mass = marg.at(k - 2) if k >= 3 else None
        pair_norms[k - 2] = sup_norm(previous @ current, row_mass) ** 2
        previous = current

    report = BoundReport(u=u, n=n, gamma=gamma, phi=phi, exact_abs4=exact_abs4,
                         step_abs_sq=step_abs_sq, product_bound=product_bound,
                         exp_relaxation=exp_relaxation, pair_norms=pair_norms,
                         pair_bounds=pair_bounds)
    if n >= 2:
        report.odd_pair_product = float(np.prod(pair_norms[0::2]))
        report.even_pair_product = float(np.prod(pair_norms[1::2]))
        report.odd_pair_bound = float(np.prod(pair_bounds[0::2]))
        report.even_pair_bound = float(np.prod(pair_bounds[1::2]))

    if exact_abs4 > product_bound + tol:
        report.violations.append(
            f"u={u:.12g}: |φ_n|^4 = {exact_abs4:.15g} exceeds product bound {product_bound:.15g}")
    for k in np.flatnonzero(pair_norms > pair_bounds + tol):
        report.violations.append(
            f"u={u:.12g}: pair ({k + 1},{k + 2}) norm^2 {pair_norms[k]:.15g} exceeds {pair_bounds[k]:.15g}")
    for parity, product, bound in (("odd", report.odd_pair_product, report.odd_pair_bound),
                                   ("even", report.even_pair_product, report.even_pair_bound)):
        if product > bound + tol:
            report.violations.append(
                f"u={u:.12g}: {parity} pair product {product:.15g} exceeds {bound:.15g}")

    if report.violations:
        logger.error("❌ Characteristic function bound violated", u=u, n=n, gamma=gamma,
                     count=len(report.violations))
        if strict:
            raise BoundViolation(violations=report.violations)
    return report
