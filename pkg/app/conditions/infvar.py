#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Diagnostics for identically distributed summands that may have infinite
variance: UAN, the truncated-variance ratio, slow variation of H and the
symmetrization domination chain.
"""

from typing import Literal, Optional, Sequence, Union

import numpy as np

from ..chain import DiscreteLaw
from ..common import INEQUALITY_TOL, ModelError, get_logger
from ..llt.norming import norming_sequence
from .models import ConditionReport

logger = get_logger(__name__)

DEFAULT_UAN_POINTS = (0.5, 1.0, 2.0)
SYMMETRIZATION_ATOMS = 4096


def _domination_chain(law: DiscreteLaw, x: np.ndarray):
    """
    Symmetrized tail ratio, its Markov dominator and the desymmetrized bound,
    per x (NaN where a ratio is undefined). The n summands cancel out of
    each ratio for identically distributed steps.
    """
    sym = law.symmetrized(max_atoms=SYMMETRIZATION_ATOMS)
    second = law.second_moment
    inner = sym.truncated_second_moment(x)
    outer = sym.tail_second_moment(x)
    with np.errstate(invalid="ignore", divide="ignore"):
        symmetrized = np.where(inner > 0, x * x * sym.tail_prob(x) / inner, np.nan)
        markov = np.where(inner > 0, outer / (2.0 * second - outer), np.nan)
        desym_num = 8.0 * law.tail_second_moment(x / 2.0)
        desym_den = 2.0 * second - desym_num
        desymmetrized = np.where(desym_den > 0, desym_num / desym_den, np.nan)
    return symmetrized, markov, desymmetrized


def infvar_diagnostics(dist: Union[DiscreteLaw, Sequence[float], np.ndarray], n_grid: Sequence[int],
                       x_grid: Sequence[float],
                       b_choice: Literal["norming", "sqrt_n"] = "norming",
                       uan_points: Sequence[float] = DEFAULT_UAN_POINTS,
                       tol: float = INEQUALITY_TOL) -> ConditionReport:
    """
    Args:
        dist: finite law, or a sample turned into its empirical law
        n_grid: sample sizes for the UAN suprema
        x_grid: truncation levels for the ratio diagnostics
        b_choice: b_n from norming_sequence, or sqrt(n E X^2)

    Returns:
        ConditionReport over x_grid with values x^2 P(|X|>x) / H(x)
    """
    law = dist if isinstance(dist, DiscreteLaw) else DiscreteLaw.from_sample(dist)
    notes = []
    if abs(law.mean) > 1e-12:
        notes.append(f"law recentered (mean {law.mean:.6g})")
        law = law.centered()
    x = np.unique(np.asarray(x_grid, dtype=float))
    if x.size == 0 or np.any(x <= 0):
        raise ModelError("x-grid must hold positive truncation levels")
    ns = sorted(set(int(n) for n in n_grid))
    if not ns or ns[0] < 1:
        raise ModelError("n-grid must hold positive integers")

    H = law.truncated_second_moment(x)
    with np.errstate(invalid="ignore", divide="ignore"):
        eq2 = np.where(H > 0, x * x * law.tail_prob(x) / H, np.nan)
        V = law.truncated_variance(x)
        atilde = np.where(V > 0, x * x * law.tail_prob(x) / V, np.nan)

    if b_choice == "norming":
        b = norming_sequence(law, ns).b
    elif b_choice == "sqrt_n":
        b = np.sqrt(np.asarray(ns, dtype=float) * law.second_moment)
    else:
        raise ModelError(f"unknown norming choice '{b_choice}'")

    extras = {"atilde1": atilde.tolist(), "n_grid": [float(n) for n in ns], "b_n": b.tolist()}
    for point in uan_points:
        extras[f"uan_{point:g}"] = [float(law.tail_prob(bn * point)) for bn in b]

    failures = []
    if law.values.size <= SYMMETRIZATION_ATOMS:
        symmetrized, markov, desym = _domination_chain(law, x)
        extras.update({"domination_symmetrized": symmetrized.tolist(), "domination_markov": markov.tolist(),
                       "domination_desymmetrized": desym.tolist()})
        for xi, s1, s2, s3 in zip(x, symmetrized, markov, desym):
            if np.isfinite(s1) and np.isfinite(s2) and s1 > s2 * (1 + tol) + tol:
                failures.append(f"x={xi:.12g}: symmetrized ratio {s1:.15g} exceeds Markov dominator {s2:.15g}")
            if np.isfinite(s2) and np.isfinite(s3) and s2 > s3 * (1 + tol) + tol:
                failures.append(f"x={xi:.12g}: Markov dominator {s2:.15g} exceeds desymmetrized bound {s3:.15g}")
    else:
        notes.append(f"symmetrization skipped: {law.values.size} atoms > {SYMMETRIZATION_ATOMS}")

    finite_eq2 = eq2[np.isfinite(eq2)]
    uan_trend = np.asarray(extras[f"uan_{uan_points[0]:g}"])
    if failures:
        verdict = "violated"
        logger.error("❌ Symmetrization domination failed", count=len(failures))
    elif finite_eq2.size > 1 and np.all(np.diff(finite_eq2) <= tol) and np.all(np.diff(uan_trend) <= tol):
        verdict = "satisfied-at-this-scale"
    else:
        verdict = "inconclusive"
    return ConditionReport(name="infvar", params={"b_choice": b_choice, "uan_points": list(uan_points)},
                           grid=x.tolist(), values=eq2.tolist(), verdict=verdict, extras=extras,
                           notes=notes, inequality_failures=failures)
