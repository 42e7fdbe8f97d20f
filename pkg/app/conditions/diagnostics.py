#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Finite-n diagnostics for the Lindeberg condition, Conditions A, A1, B, B1, B2
and the (C1)/(C2) integrals. Every statistic is an exact finite sum over the
marginal atoms of the chain; thresholds turn trends into verdicts.
"""

from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import trapezoid

from ..chain import ChainSpec, doeblin_bounds, effective_observables, exact_moments, marginals, sandwich_bounds
from ..charfn import charfn_grid, step_charfn_grid
from ..common import INEQUALITY_TOL, ModelError, get_logger
from .models import ConditionReport

logger = get_logger(__name__)

LINDEBERG_THRESHOLD = 0.01
KAPPA_MIN = 1e-3
B_THRESHOLD = 1.0
A1_CONSTANT = 0.9


def _n_grid(n_grid: Sequence[int]) -> List[int]:
    grid = [int(n) for n in n_grid]
    if not grid or any(n < 1 for n in grid):
        raise ModelError("n-grid must be a nonempty list of positive integers")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ModelError("n-grid must be strictly increasing")
    return grid


def _atoms(chain: ChainSpec, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Marginal masses and effective observables, both n x size."""
    marg = marginals(chain, n)
    return marg.marginals, effective_observables(chain, marg)


def _gamma(chain: ChainSpec, n: int, gamma: Optional[float]) -> float:
    gamma = doeblin_bounds(chain, n).gamma if gamma is None else gamma
    if gamma <= 0:
        raise ModelError("γ = 0: Doeblin condition fails, refusing the diagnostic")
    return gamma


def lindeberg_profile(chain: ChainSpec, eps: float, n_grid: Sequence[int],
                      threshold: float = LINDEBERG_THRESHOLD) -> ConditionReport:
    """L_n(eps) = (1/tau_n^2) Σ_{k<=n} E(X_k^2 1{|X_k| >= eps tau_n})."""
    if eps <= 0:
        raise ModelError(f"eps must be > 0, got {eps}")
    grid = _n_grid(n_grid)
    P, H = _atoms(chain, grid[-1])
    weighted = P * H * H
    tau_sq = np.cumsum(weighted.sum(axis=1))

    values, sigma_form = [], []
    for n in grid:
        if tau_sq[n - 1] <= 0:
            raise ModelError(f"tau_n^2 = 0 at n = {n}: degenerate observables")
        tau = np.sqrt(tau_sq[n - 1])
        values.append(float(weighted[:n][np.abs(H[:n]) >= eps * tau].sum() / tau_sq[n - 1]))
        sigma = np.sqrt(max(exact_moments(chain, n).sigma_sq, 0.0))
        sigma_form.append(float(weighted[:n][np.abs(H[:n]) >= eps * sigma].sum() / tau_sq[n - 1])
                          if sigma > 0 else float("nan"))

    if values[-1] < threshold:
        verdict = "satisfied-at-this-scale"
    elif len(values) > 1 and values[-1] >= values[0]:
        verdict = "violated"
    else:
        verdict = "inconclusive"
    return ConditionReport(name="lindeberg", params={"eps": eps, "threshold": threshold},
                           grid=grid, values=values, verdict=verdict,
                           extras={"sigma_form": sigma_form, "tau_sq": [float(tau_sq[n - 1]) for n in grid]})


def condition_A_profile(chain: ChainSpec, delta: float, n: int, u_grid: Optional[Sequence[float]] = None,
                        gamma: Optional[float] = None, kappa_min: float = KAPPA_MIN) -> ConditionReport:
    """
    G_n(u) = (γ/8) Σ_{k<=n} (1 - |f_k(u / tau_n)|^2) on 1 <= |u| <= delta tau_n
    and the quadratic envelope constant kappa = min_u G_n(u) / u^2.
    """
    if delta <= 0:
        raise ModelError(f"delta must be > 0, got {delta}")
    gamma = _gamma(chain, n, gamma)
    P, H = _atoms(chain, n)
    tau = float(np.sqrt((P * H * H).sum()))
    u_max = delta * tau
    if u_max < 1:
        raise ModelError(f"delta * tau_n = {u_max:.4g} < 1: no admissible u at n = {n}")
    notes = []
    if u_grid is None:
        grid = np.linspace(1.0, u_max, 401)
    else:
        raw = np.unique(np.asarray(u_grid, dtype=float))
        grid = raw[(np.abs(raw) >= 1.0) & (np.abs(raw) <= u_max)]
        if grid.size < raw.size:
            notes.append(f"{raw.size - grid.size} grid points outside 1 <= |u| <= {u_max:.6g} skipped")
        if grid.size == 0:
            raise ModelError("no grid point inside the admissible window")

    f = step_charfn_grid(chain, n, grid / tau)
    G = (gamma / 8.0) * (1.0 - np.abs(f) ** 2).sum(axis=0)
    kappa = float(np.min(G / grid ** 2))
    verdict = "satisfied-at-this-scale" if kappa >= kappa_min else "violated"
    return ConditionReport(name="A", params={"delta": delta, "n": n, "gamma": gamma, "kappa_min": kappa_min,
                                             "tau_n": tau},
                           grid=grid.tolist(), values=G.tolist(), verdict=verdict,
                           extras={"kappa": [kappa], "envelope": (kappa * grid ** 2).tolist()}, notes=notes)


def condition_A1_ratio(chain: ChainSpec, delta: float, n_grid: Sequence[int],
                       c: float = A1_CONSTANT) -> ConditionReport:
    """
    Aggregate Σ E(X_k^2 1{|X_k| > delta}) / tau_n^2 and the running worst
    per-step ratio, plus the Mineka-Silverman constant and near-stationarity
    tail constants relative to the step-1 law.
    """
    if delta <= 0:
        raise ModelError(f"delta must be > 0, got {delta}")
    grid = _n_grid(n_grid)
    P, H = _atoms(chain, grid[-1])
    second = (P * H * H).sum(axis=1)
    tail = (P * H * H * (np.abs(H) > delta)).sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        step_ratio = np.where(second > 0, tail / second, 0.0)
    aggregate = np.cumsum(tail) / np.cumsum(second)
    worst = np.maximum.accumulate(step_ratio)

    values = [float(aggregate[n - 1]) for n in grid]
    worst_at = [float(worst[n - 1]) for n in grid]
    failures = [f"n={n}: aggregate ratio {v:.15g} exceeds per-step worst {w:.15g}"
                for n, v, w in zip(grid, values, worst_at) if v > w + INEQUALITY_TOL]

    # Tail comparability P(|X_k| >= x) against the step-1 law at its atoms.
    reference = np.unique(np.abs(H[0][P[0] > 0]))
    reference = reference[reference > 0]
    ratios = []
    for x in reference:
        base = P[0][np.abs(H[0]) >= x].sum()
        mass = (P * (np.abs(H) >= x)).sum(axis=1)
        ratios.append(mass / base)
    c1 = float(np.min(ratios)) if ratios else float("nan")
    c2 = float(np.max(ratios)) if ratios else float("nan")

    if values[-1] >= 1.0 - 1e-12:
        verdict = "violated"
    elif values[-1] < c:
        verdict = "satisfied-at-this-scale"
    else:
        verdict = "inconclusive"
    return ConditionReport(name="A1", params={"delta": delta, "c": c}, grid=grid, values=values,
                           verdict=verdict, inequality_failures=failures,
                           extras={"per_step_worst": worst_at,
                                   "mineka_silverman_d": [1.0 - w for w in worst_at],
                                   "near_stationarity": [c1, c2]})


def _interval_point(u: float, interval: Tuple[float, float]) -> float:
    """u or -u, whichever lies strictly inside the interval; |f_k| is even in t."""
    if u == 0:
        raise ModelError("condition B is only defined for u ≠ 0")
    t_lo, t_hi = interval
    for point in (u, -u):
        if t_lo < point < t_hi:
            return point
    raise ModelError(f"|u| = {abs(u)} must lie strictly inside ({t_lo}, {t_hi}) up to sign")


def condition_B_profile(chain: ChainSpec, u: float, interval: Tuple[float, float], n_grid: Sequence[int],
                        gamma: Optional[float] = None, t_steps: int = 41,
                        threshold: float = B_THRESHOLD) -> ConditionReport:
    """
    B_n(t) = γ / (8 ln tau_n) Σ_{k<=n} (1 - |f_k(t)|^2) over t in the interval,
    its infimum per n, and the B2 statistic sup_t (1/n) Σ |f_k(t)|^2.
    """
    point = _interval_point(u, interval)
    t_lo, t_hi = interval
    grid = _n_grid(n_grid)
    n_max = grid[-1]
    gamma = _gamma(chain, n_max, gamma)
    t = np.unique(np.concatenate([np.linspace(t_lo, t_hi, t_steps), [point]]))

    P, H = _atoms(chain, n_max)
    tau_sq = np.cumsum((P * H * H).sum(axis=1))
    abs_sq = np.abs(step_charfn_grid(chain, n_max, t)) ** 2
    loss = np.cumsum(1.0 - abs_sq, axis=0)
    mean_abs_sq = np.cumsum(abs_sq, axis=0)

    kept, values, b2, notes = [], [], [], []
    last_curve = None
    for n in grid:
        log_tau = 0.5 * np.log(tau_sq[n - 1]) if tau_sq[n - 1] > 0 else -np.inf
        if log_tau <= 0:
            notes.append(f"n={n} skipped: tau_n <= 1")
            continue
        curve = gamma / (8.0 * log_tau) * loss[n - 1]
        kept.append(n)
        values.append(float(curve.min()))
        b2.append(float((mean_abs_sq[n - 1] / n).max()))
        last_curve = curve

    if not kept:
        verdict = "inconclusive"
    elif values[-1] <= INEQUALITY_TOL:
        verdict = "violated"
    elif values[-1] > threshold:
        verdict = "satisfied-at-this-scale"
    else:
        verdict = "inconclusive"
    extras = {"b2_sup": b2, "t_grid": t.tolist()}
    if last_curve is not None:
        extras["B_at_largest_n"] = last_curve.tolist()
    return ConditionReport(name="B", params={"u": u, "interval": [t_lo, t_hi], "gamma": gamma,
                                             "threshold": threshold},
                           grid=kept, values=values, verdict=verdict, extras=extras, notes=notes)


def condition_B2_statistic(chain: ChainSpec, u: float, interval: Tuple[float, float], n_grid: Sequence[int],
                           t_steps: int = 41) -> ConditionReport:
    """sup_t (1/n) Σ_{k<=n} |f_k(t)|^2 on the interval; below 1 forces B_n(t) to grow like n / ln tau_n."""
    point = _interval_point(u, interval)
    t_lo, t_hi = interval
    grid = _n_grid(n_grid)
    t = np.unique(np.concatenate([np.linspace(t_lo, t_hi, t_steps), [point]]))
    mean_abs_sq = np.cumsum(np.abs(step_charfn_grid(chain, grid[-1], t)) ** 2, axis=0)

    values = [float((mean_abs_sq[n - 1] / n).max()) for n in grid]
    failures = [f"n={n}: mean |f_k|^2 = {v:.15g} exceeds 1" for n, v in zip(grid, values)
                if v > 1.0 + INEQUALITY_TOL]
    verdict = "satisfied-at-this-scale" if values[-1] < 1.0 - INEQUALITY_TOL else "violated"
    if verdict == "violated":
        logger.warning("⚠️ B2 statistic reaches 1 on the interval", chain=chain.name, u=u)
    return ConditionReport(name="B2", params={"u": u, "interval": [t_lo, t_hi]}, grid=grid, values=values,
                           verdict=verdict, extras={"t_grid": t.tolist()}, inequality_failures=failures)


def _weighted_median(values: np.ndarray, probs: np.ndarray) -> float:
    order = np.argsort(values)
    cum = np.cumsum(probs[order])
    return float(values[order][np.searchsorted(cum, 0.5)])


def condition_B1_mass(chain: ChainSpec, u: float, eps: float, M: float,
                      n_grid: Sequence[int],
                      shifts: Union[None, str, Sequence[float]] = None) -> ConditionReport:
    """
    (1 / ln tau_n) Σ_{j<=n} P(X_j - a_j ∈ A(u, eps)) with
    A(u, eps) = {x : |x| < M, |x u - π m| >= eps for all integers |m| <= M}.

    Args:
        shifts: None (all zero), "median" (per-step medians) or explicit a_j
    """
    if u == 0 or eps <= 0 or M <= 0:
        raise ModelError("condition B1 needs u ≠ 0, eps > 0 and M > 0")
    grid = _n_grid(n_grid)
    n_max = grid[-1]
    P, H = _atoms(chain, n_max)

    inner = (P * (np.abs(H) < M)).sum(axis=1)
    if inner.min() <= 0:
        raise ModelError(f"inf_j P(|X_j| < M) = 0 at M = {M}: choose a larger M")

    if shifts is None:
        a = np.zeros(n_max)
    elif isinstance(shifts, str):
        if shifts != "median":
            raise ModelError(f"unknown shift rule '{shifts}'")
        a = np.array([_weighted_median(H[k], P[k]) for k in range(n_max)])
    else:
        a = np.resize(np.asarray(shifts, dtype=float), n_max)

    Y = H - a[:, None]
    m = np.arange(-int(np.floor(M)), int(np.floor(M)) + 1)
    distance = np.abs(Y[:, :, None] * u - np.pi * m[None, None, :]).min(axis=2)
    member = (np.abs(Y) < M) & (distance >= eps)
    mass = (P * member).sum(axis=1)
    cum_mass = np.cumsum(mass)
    tau_sq = np.cumsum((P * H * H).sum(axis=1))

    kept, values, notes = [], [], []
    for n in grid:
        log_tau = 0.5 * np.log(tau_sq[n - 1]) if tau_sq[n - 1] > 0 else -np.inf
        if log_tau <= 0:
            notes.append(f"n={n} skipped: tau_n <= 1")
            continue
        kept.append(n)
        values.append(float(cum_mass[n - 1] / log_tau))

    # Pointwise bound |f_k(t)|^2 - 1 <= -K eps^2 P(X_k ∈ A) / 4 near u, with K fitted.
    t = np.linspace(u - eps / (4 * M), u + eps / (4 * M), 21)
    loss = 1.0 - np.abs(step_charfn_grid(chain, n_max, t)) ** 2
    positive = mass > 0
    if positive.any():
        k_u = float((4.0 * loss[positive] / (eps * eps * mass[positive, None])).min())
    else:
        k_u = float("nan")
    if positive.any() and not k_u > 0:
        notes.append(f"fitted K_u = {k_u:.6g} is not positive")

    if cum_mass[-1] <= 0:
        verdict = "violated"
    elif len(values) > 1 and all(b > a_ for a_, b in zip(values, values[1:])):
        verdict = "satisfied-at-this-scale"
    else:
        verdict = "inconclusive"
    return ConditionReport(name="B1", params={"u": u, "eps": eps, "M": M,
                                              "shifts": "median" if isinstance(shifts, str) else
                                              ("zero" if shifts is None else "explicit")},
                           grid=kept, values=values, verdict=verdict, notes=notes,
                           extras={"per_step_mass": mass.tolist(), "k_u": [k_u],
                                   "inf_inner_mass": [float(inner.min())]})


def _adaptive_trapezoid(fn, lo: float, hi: float, rel_tol: float, start: int = 257,
                        max_points: int = 2 ** 16 + 1):
    """Trapezoid rule doubling the resolution until two levels agree."""
    points = start
    x = np.linspace(lo, hi, points)
    y = fn(x)
    value = trapezoid(y, x)
    while points < max_points:
        points = 2 * points - 1
        x = np.linspace(lo, hi, points)
        y = fn(x)
        refined = trapezoid(y, x)
        if abs(refined - value) <= rel_tol * max(abs(refined), 1e-300):
            return refined, True, x, y
        value = refined
    return value, False, x, y


def c1c2_diagnostics(chain: ChainSpec, n: int, T: float, delta: float, L: float,
                     n_grid: Optional[Sequence[int]] = None, gamma: Optional[float] = None,
                     rel_tol: float = 1e-6) -> ConditionReport:
    """
    (C1): ∫_{T <= |u| <= delta sigma_n} |φ_n(u / sigma_n)| du, dominated by
    ∫ exp(-(γ/8) Σ (1 - |f_k(u / sigma_n)|^2)) du on the same grid.
    (C2): sigma_n ∫_{delta < |u| <= L} |φ_n(u)| du.
    """
    if not 0 < delta < L:
        raise ModelError(f"need 0 < delta < L, got delta={delta}, L={L}")
    if T <= 0:
        raise ModelError(f"T must be > 0, got {T}")
    grid = _n_grid(n_grid if n_grid is not None else [n])
    gamma = _gamma(chain, grid[-1], gamma)

    c1, dominators, c2, sigmas, converged, failures, notes = [], [], [], [], [], [], []
    for m in grid:
        marg = marginals(chain, m)
        stats = exact_moments(chain, m)
        sigma = float(np.sqrt(stats.sigma_sq))
        sigmas.append(sigma)
        upper = delta * sigma
        if upper > T:
            value, ok1, u, y = _adaptive_trapezoid(
                lambda v: np.abs(charfn_grid(chain, m, v / sigma, marg)), T, upper, rel_tol)
            loss = (1.0 - np.abs(step_charfn_grid(chain, m, u / sigma, marg)) ** 2).sum(axis=0)
            envelope = np.exp(-(gamma / 8.0) * loss)
            above = np.flatnonzero(y > envelope + INEQUALITY_TOL)
            if above.size:
                failures.append(f"n={m}: |φ_n(u/σ_n)| exceeds exp(-G_n) at u={u[above[0]]:.12g}")
            c1.append(2.0 * value)
            dominators.append(2.0 * float(trapezoid(envelope, u)))
        else:
            ok1 = True
            c1.append(0.0)
            dominators.append(0.0)
            notes.append(f"n={m}: delta sigma_n = {upper:.6g} <= T, (C1) range empty")
        value2, ok2, _, _ = _adaptive_trapezoid(
            lambda v: np.abs(charfn_grid(chain, m, v, marg)), delta, L, rel_tol)
        c2.append(2.0 * sigma * value2)
        converged.append(float(ok1 and ok2))
        if not (ok1 and ok2):
            notes.append(f"n={m}: integration did not reach relative tolerance {rel_tol}")

    if failures:
        verdict = "violated"
    elif len(c2) > 1:
        decayed = c2[-1] < 0.5 * c2[0] or c2[-1] < 1e-8
        verdict = "satisfied-at-this-scale" if decayed else "violated"
    else:
        verdict = "satisfied-at-this-scale" if c2[-1] < 0.1 else "inconclusive"
    lo, hi = sandwich_bounds(doeblin_bounds(chain, grid[-1]).a)
    return ConditionReport(name="c1c2", params={"T": T, "delta": delta, "L": L, "gamma": gamma,
                                                "sandwich": [lo, hi]},
                           grid=grid, values=c2, verdict=verdict, inequality_failures=failures,
                           notes=notes,
                           extras={"c1": c1, "c1_dominator": dominators, "sigma_n": sigmas,
                                   "converged": converged})
