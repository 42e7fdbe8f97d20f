#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Pydantic models for command-line run configuration and the run manifest.
"""

from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Command = Literal["validate", "simulate", "mixing", "charfn", "conditions", "llt", "gauss"]
Builtin = Literal["reference", "lattice", "two-state"]

SEED_MAX = 2 ** 64 - 1


class RunConfig(BaseModel):
    """One CLI invocation: global flags plus the flags of its subcommand."""
    model_config = ConfigDict(extra="forbid")

    command: Command = Field(..., description="Subcommand to run")
    seed: int = Field(20250820, description="64-bit seed for every random stream of the run")
    threads: int = Field(0, description="Worker bound, 0 = all cores (MIXLLT_THREADS wins)")
    out: str = Field("mixllt-out", description="Artifact directory")
    format: Literal["csv", "json"] = Field("csv", description="Format of grid artifacts")

    spec: Optional[str] = Field(None, description="Chain JSON file")
    builtin: Optional[Builtin] = Field(None, description="Built-in chain instead of --spec")

    n: Optional[int] = Field(None, description="Chain length / number of summands")
    paths: int = Field(10_000, description="Monte Carlo paths")

    lags: Optional[List[int]] = Field(None, description="Lags for the mixing profile")
    oracle: bool = Field(False, description="Cross-check psi by exhaustive event enumeration")

    u_grid: Optional[List[float]] = Field(None, description="Grid of u values")
    gamma: Optional[float] = Field(None, description="Override of γ = a^4/b")

    check: Optional[Literal["lindeberg", "A", "A1", "B", "B1", "B2", "c1c2", "infvar"]] = Field(
        None, description="Single condition to diagnose (default: all chain conditions)")
    eps: float = Field(0.1, description="Lindeberg eps / B1 eps")
    delta: float = Field(0.5, description="Condition A / A1 / (C1) delta")
    u: float = Field(1.0, description="Condition B / B1 point u")
    interval: Optional[Tuple[float, float]] = Field(None, description="Interval (c, d)")
    n_grid: Optional[List[int]] = Field(None, description="Grid of n for the profiles")
    x_grid: Optional[List[float]] = Field(None, description="Truncation levels for infvar")
    M: float = Field(2.0, description="Condition B1 bound M")
    T: float = Field(1.0, description="(C1) lower limit T")
    L: float = Field(7.0, description="(C2) upper limit L")

    mode: Literal["plain", "weighted", "linear", "infvar"] = Field("plain", description="Sum mode")
    window: Literal["tri", "epa"] = Field("tri", description="Window function")
    width: float = Field(0.5, description="Window half-width")
    weights: Optional[List[float]] = Field(None, description="Weighted-mode weights, cycled")
    coefficients: Optional[List[float]] = Field(None, description="Linear-process coefficients")
    truncation: Optional[int] = Field(None, description="Linear-process truncation K_n")

    samples: int = Field(100_000, description="Gauss samples")
    digits: int = Field(30, description="Digits per Gauss orbit")
    cap: int = Field(20, description="Digit cap K")

    @field_validator("seed")
    @classmethod
    def _seed_range(cls, value: int) -> int:
        if not 0 <= value <= SEED_MAX:
            raise ValueError("seed must be a 64-bit unsigned integer")
        return value

    @field_validator("threads", "paths", "samples", "digits", "cap")
    @classmethod
    def _non_negative(cls, value: int) -> int:
        if value < 0:
            raise ValueError("must be >= 0")
        return value

    @field_validator("n")
    @classmethod
    def _positive_length(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 1:
            raise ValueError("must be >= 1")
        return value

    @field_validator("lags")
    @classmethod
    def _lags_present(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is None:
            return value
        if not value:
            raise ValueError("needs at least one lag")
        if min(value) < 1:
            raise ValueError("lags must be >= 1")
        return value

    @model_validator(mode="after")
    def _chain_source(self) -> "RunConfig":
        if self.spec and self.builtin:
            raise ValueError("use either --spec or --builtin, not both")
        needs_chain = self.command not in ("gauss",) and not (self.command == "llt" and self.mode == "infvar")
        if needs_chain and not (self.spec or self.builtin):
            raise ValueError(f"'{self.command}' needs --spec FILE or --builtin NAME")
        return self

    def echo(self) -> Dict[str, Any]:
        """Config as recorded in the manifest; the worker bound never reaches artifacts."""
        return self.model_dump(mode="json", exclude={"threads"})


class ArtifactRecord(BaseModel):
    path: str = Field(..., description="File name relative to the output directory")
    sha256: str = Field(..., description="Hex digest of the file content")
    bytes: int = Field(..., description="File size")


class RunManifest(BaseModel):
    """Reproducibility record written next to every run's artifacts."""

    schema_version: str = Field(..., description="Report schema version")
    command: str = Field(..., description="Subcommand")
    config: Dict[str, Any] = Field(..., description="Echo of the resolved RunConfig")
    artifacts: List[ArtifactRecord] = Field(default_factory=list)
    versions: Dict[str, str] = Field(default_factory=dict, description="Package versions")
    exit_status: int = Field(0, description="0 ok, 1 bound violated, 2 usage error")
    started_at: str = Field(..., description="ISO timestamp")
    duration_seconds: float = Field(0.0, description="Wall time")
