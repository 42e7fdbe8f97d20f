#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Exact computations on finite-state chains: validation, marginals, Doeblin
constants and second moments of partial sums.
"""

import json
from pathlib import Path
from typing import Any, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from ..common import ModelError, STOCHASTIC_TOL, ZERO_MASS, get_logger
from .models import (
    ChainSpec, ChainSpecFile, DoeblinBounds, MarginalSequence, StepKernel, VarianceStats
)

logger = get_logger(__name__)


def _check_distribution(label: str, values: np.ndarray, size: int, violations: List[str]) -> None:
    if values.ndim != 1 or values.shape[0] != size:
        violations.append(f"{label}: length {values.shape[-1] if values.ndim else 0} does not match {size} states")
        return
    if not np.all(np.isfinite(values)):
        violations.append(f"{label}: non-finite entries")
        return
    if np.any(values < 0):
        violations.append(f"{label}: negative entry {values.min():.6g}")
    total = values.sum()
    if abs(total - 1.0) > STOCHASTIC_TOL:
        violations.append(f"{label}: sum {total:.6g} ≠ 1")


def validate_spec(spec: Union[Mapping[str, Any], ChainSpecFile]) -> ChainSpec:
    """
    Normalize a raw chain description.

    Args:
        spec: parsed JSON mapping or ChainSpecFile

    Returns:
        ChainSpec ready for the numeric modules

    Raises:
        ModelError: with every violation found (row sums, signs, dimensions)
    """
    if not isinstance(spec, ChainSpecFile):
        try:
            spec = ChainSpecFile(**spec)
        except ValidationError as e:
            raise ModelError(violations=[f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
                                         for err in e.errors()])

    violations: List[str] = []
    size = spec.states
    if size < 1:
        raise ModelError("empty state space")

    initial = np.asarray(spec.initial, dtype=float)
    _check_distribution("initial", initial, size, violations)

    try:
        kernels_raw = np.asarray(spec.kernels, dtype=float)
        observables_raw = np.asarray(spec.observables, dtype=float)
    except ValueError:
        raise ModelError("kernels/observables: ragged nested lists")
    if kernels_raw.ndim == 2:
        kernels_raw = kernels_raw[None, :, :]
        homogeneous = True
    else:
        homogeneous = False
    if kernels_raw.ndim != 3 or kernels_raw.shape[1:] != (size, size):
        violations.append(f"kernels: shape {kernels_raw.shape[1:]} is not ({size}, {size})")
    else:
        for index, rows in enumerate(kernels_raw):
            label = "kernel" if homogeneous else f"kernel {index + 2}"
            for x, row in enumerate(rows):
                if not np.all(np.isfinite(row)):
                    violations.append(f"{label} row {x}: non-finite entries")
                    continue
                if np.any(row < 0):
                    violations.append(f"{label} row {x}: negative entry {row.min():.6g}")
                total = row.sum()
                if abs(total - 1.0) > STOCHASTIC_TOL:
                    violations.append(f"{label} row {x}: row sum {total:.6g} ≠ 1")

    shared_observable = observables_raw.ndim == 1
    if shared_observable:
        observables_raw = observables_raw[None, :]
    if observables_raw.ndim != 2 or observables_raw.shape[1] != size:
        violations.append(f"observables: length {observables_raw.shape[-1]} does not match {size} states")
    elif not np.all(np.isfinite(observables_raw)):
        violations.append("observables: non-finite entries")

    if violations:
        raise ModelError(violations=violations)

    return ChainSpec(
        initial=initial,
        kernels=tuple(StepKernel(rows) for rows in kernels_raw),
        observables=tuple(observables_raw),
        center=spec.center,
        name=spec.name or "chain",
        homogeneous=homogeneous,
        shared_observable=shared_observable,
    )


def load_chain(path: Union[str, Path]) -> ChainSpec:
    """Read and validate a chain JSON file."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ModelError(f"chain file not found: {path}")
    except UnicodeDecodeError as e:
        raise ModelError(f"{path} is not UTF-8 text: byte {e.object[e.start]:#04x} at offset {e.start}")
    except json.JSONDecodeError as e:
        raise ModelError(f"malformed JSON in {path}: {e.msg} at line {e.lineno}")
    if not isinstance(raw, dict):
        raise ModelError(f"{path}: expected a JSON object")
    raw.setdefault("name", path.stem)
    return validate_spec(raw)


def make_chain(initial, kernels, observables, center: bool = True, name: str = "chain") -> ChainSpec:
    """Build a validated chain from array-likes."""
    return validate_spec({
        "states": len(initial),
        "initial": np.asarray(initial, dtype=float).tolist(),
        "kernels": np.asarray(kernels, dtype=float).tolist(),
        "observables": np.asarray(observables, dtype=float).tolist(),
        "center": center,
        "name": name,
    })


def with_observables(chain: ChainSpec, observables: np.ndarray, center: bool = False) -> ChainSpec:
    """Same kernels and initial law, new observables; a single row is shared by every step."""
    observables = np.atleast_2d(np.asarray(observables, dtype=float))
    return ChainSpec(initial=chain.initial, kernels=chain.kernels, observables=tuple(observables),
                     center=center, name=chain.name, homogeneous=chain.homogeneous_kernel)


def _check_length(chain: ChainSpec, n: int) -> None:
    if n < 1:
        raise ModelError(f"chain length must be >= 1, got {n}")
    horizon = chain.horizon
    if horizon is not None and n > horizon:
        raise ModelError(f"chain '{chain.name}' only describes {horizon} steps, {n} requested")


def marginals(chain: ChainSpec, n: int) -> MarginalSequence:
    """P_1 = initial, P_k = P_{k-1} Q_k."""
    _check_length(chain, n)
    out = np.empty((n, chain.size))
    out[0] = chain.initial
    for k in range(2, n + 1):
        out[k - 1] = out[k - 2] @ chain.kernel(k)
    return MarginalSequence(out)


def effective_observables(chain: ChainSpec, marg: MarginalSequence,
                          center: Optional[bool] = None) -> np.ndarray:
    """Per-step observables (n x size) after the centering decision."""
    n = marg.length
    g = np.vstack([chain.observable(k) for k in range(1, n + 1)])
    if chain.center if center is None else center:
        g = g - np.einsum("ks,ks->k", marg.marginals, g)[:, None]
    return g


def doeblin_bounds(chain: ChainSpec, n: int, zero_mass: float = ZERO_MASS) -> DoeblinBounds:
    """
    Constants a, b of aP_k(y) <= Q_k(x, y) <= bP_k(y) over mass-carrying pairs.

    The virtual first step (Q_1(x, .) = P_1) contributes ratio 1 and is implied
    by a <= 1 <= b, which the mediant inequality guarantees at every step.
    """
    marg = marginals(chain, n)
    a, b = 1.0, 1.0
    attained = {"a": (1, 0, 0), "b": (1, 0, 0)}
    for k in range(2, n + 1):
        prev, cur, Q = marg.at(k - 1), marg.at(k), chain.kernel(k)
        rows = np.flatnonzero(prev > zero_mass)
        cols = np.flatnonzero(cur > zero_mass)
        dead = np.flatnonzero(cur <= zero_mass)
        if dead.size and np.any(Q[np.ix_(rows, dead)] > zero_mass):
            logger.warning("⚠️ Doeblin condition fails: kernel reaches a zero-mass state", step=k)
            return DoeblinBounds(a=0.0, b=float("inf"), gamma=0.0,
                                 attained_at={"a": (k, -1, -1), "b": (k, -1, -1)})
        ratio = Q[np.ix_(rows, cols)] / cur[cols]
        i, j = np.unravel_index(np.argmin(ratio), ratio.shape)
        if ratio[i, j] < a:
            a = float(ratio[i, j])
            attained["a"] = (k, int(rows[i]), int(cols[j]))
        i, j = np.unravel_index(np.argmax(ratio), ratio.shape)
        if ratio[i, j] > b:
            b = float(ratio[i, j])
            attained["b"] = (k, int(rows[i]), int(cols[j]))
    return DoeblinBounds(a=a, b=b, gamma=a ** 4 / b, attained_at=attained)


def exact_moments(chain: ChainSpec, n: int, recenter: Optional[bool] = None) -> VarianceStats:
    """
    Exact tau_n^2, sigma_n^2 and cross terms of S_n.

    Cross terms use the backward accumulation W_{k-1} = Q_k (h_k + W_k), so
    Σ_{j<k} E(X_j X_k) = Σ_j Σ_x P_j(x) h_j(x) W_j(x).
    """
    marg = marginals(chain, n)
    raw = effective_observables(chain, marg, center=False)
    means = np.einsum("ks,ks->k", marg.marginals, raw)
    h = effective_observables(chain, marg, center=recenter)

    per_step = np.einsum("ks,ks->k", marg.marginals, h * h)
    tau_sq = float(per_step.sum())

    cross = 0.0
    W = np.zeros(chain.size)
    for k in range(n, 1, -1):
        cross += float(marg.at(k) @ (h[k - 1] * W))
        W = chain.kernel(k) @ (h[k - 1] + W)
    cross += float(marg.at(1) @ (h[0] * W))

    return VarianceStats(tau_sq=tau_sq, sigma_sq=tau_sq + 2.0 * cross, per_step_var=per_step,
                         cross_terms=cross, means=means,
                         centered=chain.center if recenter is None else recenter)


def sandwich_bounds(a: float) -> Tuple[float, float]:
    """Range of sigma_n^2 / tau_n^2 under the Doeblin lower constant a."""
    if a <= 0:
        return 0.0, float("inf")
    return a / (2.0 - a), (2.0 - a) / a


def rho_sandwich(rho1: float) -> Tuple[float, float]:
    """Range of sigma_n^2 / tau_n^2 given the lag-one maximal correlation."""
    if rho1 >= 1:
        return 0.0, float("inf")
    return (1.0 - rho1) / (1.0 + rho1), (1.0 + rho1) / (1.0 - rho1)


def stationary_distribution(kernel: Sequence[Sequence[float]]) -> np.ndarray:
    """Solve pi Q = pi, sum(pi) = 1 by least squares."""
    Q = np.asarray(kernel, dtype=float)
    size = Q.shape[0]
    A = np.vstack([Q.T - np.eye(size), np.ones(size)])
    rhs = np.zeros(size + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()
