#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Data models for finite-state chains: the JSON file schema (pydantic) and the
immutable numeric types passed between modules (frozen dataclasses).
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=float)
    out.setflags(write=False)
    return out


class ChainSpecFile(BaseModel):
    """Chain description as stored on disk."""
    model_config = ConfigDict(extra="forbid")

    states: int = Field(..., description="Number of states")
    initial: List[float] = Field(..., description="Initial distribution P_1")
    kernels: Union[List[List[float]], List[List[List[float]]]] = Field(
        ..., description="One kernel reused for all steps, or one kernel per step k = 2..n"
    )
    observables: Union[List[float], List[List[float]]] = Field(
        ..., description="One shared observable, or one per step k = 1..n"
    )
    center: bool = Field(True, description="Subtract E g_k under P_k from each observable")
    name: Optional[str] = Field(None, description="Label used in provenance")


@dataclass(frozen=True)
class StepKernel:
    """Transition matrix Q_k(x, y) of one step."""
    rows: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rows", _frozen(self.rows))

    @property
    def size(self) -> int:
        return self.rows.shape[0]


@dataclass(frozen=True)
class ChainSpec:
    """
    Normalized chain: initial law, kernels for steps 2..n and observables for
    steps 1..n. A shared kernel or observable is reused for every step; a
    per-step list of any length bounds the horizon.
    """
    initial: np.ndarray
    kernels: Tuple[StepKernel, ...]
    observables: Tuple[np.ndarray, ...]
    center: bool = True
    name: str = "chain"
    homogeneous: Optional[bool] = None
    shared_observable: Optional[bool] = None

    def __post_init__(self):
        if self.homogeneous is None:
            object.__setattr__(self, "homogeneous", len(self.kernels) == 1)
        if self.shared_observable is None:
            object.__setattr__(self, "shared_observable", len(self.observables) == 1)
        if self.homogeneous and len(self.kernels) != 1:
            raise ValueError(f"a shared kernel needs exactly one matrix, got {len(self.kernels)}")
        if self.shared_observable and len(self.observables) != 1:
            raise ValueError(f"a shared observable needs exactly one vector, got {len(self.observables)}")
        object.__setattr__(self, "initial", _frozen(self.initial))
        object.__setattr__(self, "observables", tuple(_frozen(g) for g in self.observables))

    @property
    def size(self) -> int:
        return self.initial.shape[0]

    @property
    def homogeneous_kernel(self) -> bool:
        return bool(self.homogeneous)

    @property
    def horizon(self) -> Optional[int]:
        """Largest n the description covers, None when unbounded."""
        limits = []
        if not self.homogeneous_kernel:
            limits.append(len(self.kernels) + 1)
        if not self.shared_observable:
            limits.append(len(self.observables))
        return min(limits) if limits else None

    def kernel(self, k: int) -> np.ndarray:
        """Q_k for k >= 2."""
        if k < 2:
            raise IndexError(f"kernel index starts at 2, got {k}")
        if self.homogeneous_kernel:
            return self.kernels[0].rows
        return self.kernels[k - 2].rows

    def observable(self, k: int) -> np.ndarray:
        """Raw g_k for k >= 1."""
        if self.shared_observable:
            return self.observables[0]
        return self.observables[k - 1]

    def to_file(self) -> ChainSpecFile:
        kernels = ([K.rows.tolist() for K in self.kernels] if not self.homogeneous_kernel
                   else self.kernels[0].rows.tolist())
        observables = ([g.tolist() for g in self.observables] if not self.shared_observable
                       else self.observables[0].tolist())
        return ChainSpecFile(states=self.size, initial=self.initial.tolist(), kernels=kernels,
                             observables=observables, center=self.center, name=self.name)


@dataclass(frozen=True)
class MarginalSequence:
    """Marginal laws P_1..P_n stacked row-wise."""
    marginals: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "marginals", _frozen(self.marginals))

    @property
    def length(self) -> int:
        return self.marginals.shape[0]

    def at(self, k: int) -> np.ndarray:
        """P_k, 1-based."""
        return self.marginals[k - 1]


@dataclass(frozen=True)
class DoeblinBounds:
    a: float
    b: float
    gamma: float
    attained_at: Dict[str, Tuple[int, int, int]] = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        return self.a > 0 and np.isfinite(self.b)


@dataclass(frozen=True)
class VarianceStats:
    tau_sq: float
    sigma_sq: float
    per_step_var: np.ndarray
    cross_terms: float
    means: np.ndarray
    centered: bool = True

    @property
    def ratio(self) -> float:
        """sigma_n^2 / tau_n^2."""
        return self.sigma_sq / self.tau_sq if self.tau_sq > 0 else float("nan")


@dataclass(frozen=True)
class PathBatch:
    count: int
    length: int
    seed: int
    states: np.ndarray
    block_size: int
