#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Report model shared by every condition diagnostic.
"""

from typing import Any, Dict, List, Literal

from pydantic import BaseModel, Field, field_validator

from ..common import SCHEMA_VERSION

Verdict = Literal["satisfied-at-this-scale", "violated", "inconclusive"]


class ConditionReport(BaseModel):
    """Finite-scale evaluation of one hypothesis."""
    name: str = Field(..., description="Condition identifier")
    params: Dict[str, Any] = Field(default_factory=dict, description="Parameters used")
    grid: List[float] = Field(..., description="Evaluation points (u, t, x or n)")
    values: List[float] = Field(..., description="Statistic at each grid point")
    verdict: Verdict = Field(..., description="Finite-scale verdict")
    extras: Dict[str, List[float]] = Field(default_factory=dict, description="Companion series")
    notes: List[str] = Field(default_factory=list, description="Skipped points and caveats")
    inequality_failures: List[str] = Field(default_factory=list,
                                           description="Proven inequalities that failed beyond tolerance")
    schema_version: str = Field(SCHEMA_VERSION, description="Report schema version")

    @field_validator("grid")
    @classmethod
    def grid_strictly_increasing(cls, v: List[float]) -> List[float]:
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("grid must be strictly increasing")
        return v
