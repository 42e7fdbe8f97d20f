#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
Run orchestration for the mixllt command line: resolves the chain, runs one
subcommand, writes CSV/JSON artifacts and the manifest, and maps outcomes to
exit statuses (0 ok, 1 bound violated, 2 usage error).
"""

import hashlib
import json
import logging
import math
import sys
from datetime import datetime
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
import pandas as pd

from .. import __version__
from ..chain import (
    ChainSpec, DiscreteLaw, doeblin_bounds, effective_observables, exact_moments, lattice_chain,
    load_chain, marginals, reference_chain, sandwich_bounds, simulate_paths, two_state_chain
)
from ..charfn import nagaev_bound
from ..common import LOG_LEVEL, SCHEMA_VERSION, BoundViolation, ModelError, measure_performance, resolve_threads
from ..conditions import (
    c1c2_diagnostics, condition_A1_ratio, condition_A_profile, condition_B1_mass, condition_B2_statistic,
    condition_B_profile, infvar_diagnostics, lindeberg_profile
)
from ..gauss import digit_law, digit_sums, empirical_chain, empirical_lag_joint, infvar_tail_sums, sample_digits
from ..llt import LinearProcessSpec, WindowFunction, build_sums, clt_ks, interval_scan, llt_scan
from ..mixing import exhaustive_psi, lag_joint, mixing_coeffs, mixing_profile
from .models import ArtifactRecord, RunConfig, RunManifest

BUILTINS = {
    "reference": reference_chain,
    "lattice": lattice_chain,
    "two-state": two_state_chain,
}

VERSIONED_PACKAGES = ("numpy", "scipy", "pandas", "pydantic", "structlog", "tqdm")
ORACLE_TOL = 1e-12
ALL_CHAIN_CHECKS = ("lindeberg", "A", "A1", "B", "B1", "B2", "c1c2")


def _clean(value: Any) -> Any:
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


class RunWorkflow:
    """
    Executes one RunConfig. Output assembly is single-threaded and ordered;
    all parallelism lives in the simulation modules.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.logger = self._setup_logger()
        self.out = Path(config.out)
        self.artifacts: List[ArtifactRecord] = []
        self.violations: List[str] = []

    def _setup_logger(self):
        """Setup logger for the run."""
        logger = logging.getLogger('mixllt.RunWorkflow')
        if not logger.handlers:
            handler = logging.StreamHandler(sys.stderr)
            formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
            handler.setFormatter(formatter)
            logger.addHandler(handler)
            logger.setLevel(getattr(logging, LOG_LEVEL, logging.INFO))
            logger.propagate = False
        return logger

    # ----------------------------------------------------------------- plumbing

    def _chain(self) -> ChainSpec:
        if self.config.builtin:
            return BUILTINS[self.config.builtin]()
        return load_chain(self.config.spec)

    def _length(self, chain: ChainSpec, default: int) -> int:
        if self.config.n is not None:
            return self.config.n
        return default if chain.horizon is None else min(default, chain.horizon)

    def _record(self, path: Path) -> None:
        data = path.read_bytes()
        self.artifacts.append(ArtifactRecord(path=path.name, sha256=hashlib.sha256(data).hexdigest(),
                                             bytes=len(data)))

    def _write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        path = self.out / name
        body = dict(payload)
        body.setdefault("schema_version", SCHEMA_VERSION)
        path.write_text(json.dumps(_clean(body), sort_keys=True, indent=2) + "\n", encoding="utf-8")
        self._record(path)
        return path

    def _write_table(self, stem: str, frame: pd.DataFrame) -> Path:
        if self.config.format == "csv":
            path = self.out / f"{stem}.csv"
            frame.to_csv(path, index=False, float_format="%.17g", encoding="utf-8", lineterminator="\n")
        else:
            path = self.out / f"{stem}.json"
            records = _clean(frame.to_dict(orient="records"))
            path.write_text(json.dumps({"schema_version": SCHEMA_VERSION, "rows": records},
                                       sort_keys=True, indent=2) + "\n", encoding="utf-8")
        self._record(path)
        return path

    def _write_manifest(self, status: int, started: datetime) -> None:
        versions = {"mixllt": __version__}
        for package in VERSIONED_PACKAGES:
            try:
                versions[package] = metadata.version(package)
            except metadata.PackageNotFoundError:
                versions[package] = "unknown"
        manifest = RunManifest(schema_version=SCHEMA_VERSION, command=self.config.command,
                               config=self.config.echo(), artifacts=self.artifacts, versions=versions,
                               exit_status=status, started_at=started.isoformat(),
                               duration_seconds=measure_performance(started))
        path = self.out / "manifest.json"
        path.write_text(json.dumps(_clean(manifest.model_dump(mode="json")), sort_keys=True, indent=2) + "\n",
                        encoding="utf-8")

    def run(self) -> int:
        """Run the subcommand; returns the exit status."""
        started = datetime.now()
        status = 0
        try:
            resolve_threads(self.config.threads)
            self.out.mkdir(parents=True, exist_ok=True)
            handler = getattr(self, f"_run_{self.config.command}")
            handler()
            if self.violations:
                self._write_json("violations.json", {"violations": self.violations})
                for line in self.violations:
                    print(f"❌ {line}", file=sys.stderr)
                status = 1
        except ModelError as e:
            for line in e.violations:
                print(f"❌ {line}", file=sys.stderr)
            self.logger.error(f"❌ Usage error: {e}")
            status = 2
        except BoundViolation as e:
            self.violations.extend(e.violations)
            for line in e.violations:
                print(f"❌ {line}", file=sys.stderr)
            status = 1
        except OSError as e:
            print(f"❌ {e}", file=sys.stderr)
            return 2
        if self.out.is_dir():
            self._write_manifest(status, started)
        if status == 0:
            self.logger.info(f"✅ {self.config.command} finished in {measure_performance(started):.2f}s, "
                             f"artifacts in {self.out}")
        return status

    # ---------------------------------------------------------------- commands

    def _run_validate(self):
        chain = self._chain()
        n = self._length(chain, 100)
        bounds = doeblin_bounds(chain, n)
        stats = exact_moments(chain, n)
        lo, hi = sandwich_bounds(bounds.a)
        summary = {
            "name": chain.name, "states": chain.size, "horizon": chain.horizon,
            "homogeneous": chain.homogeneous_kernel, "center": chain.center, "n": n,
            "doeblin": {"a": bounds.a, "b": bounds.b, "gamma": bounds.gamma,
                        "attained_at": {k: list(v) for k, v in bounds.attained_at.items()}},
            "tau_sq": stats.tau_sq, "sigma_sq": stats.sigma_sq, "ratio": stats.ratio,
            "sandwich": [lo, hi],
        }
        if bounds.a > 0 and not lo - 1e-10 <= stats.ratio <= hi + 1e-10:
            self.violations.append(f"n={n}: sigma^2/tau^2 = {stats.ratio:.15g} outside [{lo:.15g}, {hi:.15g}]")
        (self.out / "chain.json").write_text(
            json.dumps(chain.to_file().model_dump(), sort_keys=True, indent=2) + "\n", encoding="utf-8")
        self._record(self.out / "chain.json")
        self._write_json("validate.json", summary)
        print(f"✅ {chain.name}: {chain.size} states, horizon {chain.horizon or 'unbounded'}, "
              f"a={bounds.a:.6g} b={bounds.b:.6g} γ={bounds.gamma:.6g}, σ²/τ²={stats.ratio:.6g} at n={n}")

    def _run_simulate(self):
        chain = self._chain()
        n = self._length(chain, 100)
        batch = simulate_paths(chain, n, self.config.paths, self.config.seed, threads=self.config.threads)
        marg = marginals(chain, n)
        rows = []
        for k in range(1, n + 1):
            counts = np.bincount(batch.states[:, k - 1], minlength=chain.size) / batch.count
            for x in range(chain.size):
                rows.append({"k": k, "state": x, "exact": marg.at(k)[x], "empirical": counts[x]})
        self._write_table("marginals", pd.DataFrame(rows))

        h = effective_observables(chain, marg)
        sums = h[np.arange(n)[None, :], batch.states].sum(axis=1)
        stats = exact_moments(chain, n)
        self._write_table("sums", pd.DataFrame({"path": np.arange(batch.count), "sum": sums}))
        self._write_json("simulate.json", {"n": n, "paths": batch.count, "seed": self.config.seed,
                                           "mean": float(sums.mean()), "variance": float(sums.var(ddof=1)),
                                           "sigma_sq": stats.sigma_sq})

    def _run_mixing(self):
        chain = self._chain()
        lags = self.config.lags if self.config.lags is not None else [1, 2, 3, 4, 5]
        n = self._length(chain, max(lags) + 1)
        profiles = mixing_profile(chain, n, lags)
        a = doeblin_bounds(chain, n).a
        rows, pairs = [], []
        for profile in profiles:
            rows.append({"lag": profile.lag, "psi_lower": profile.psi_lower, "psi_upper": profile.psi_upper,
                         "rho": profile.rho, "bradley_gap": profile.bradley_gap})
            for m, coeffs in profile.per_start:
                pairs.append({"lag": profile.lag, "m": m, "psi_lower": coeffs.psi_lower,
                              "psi_upper": coeffs.psi_upper, "rho": coeffs.rho,
                              "bradley_gap": coeffs.bradley_gap, "degenerate": coeffs.degenerate})
                if coeffs.bradley_gap < -1e-10:
                    self.violations.append(f"lag={profile.lag} m={m}: rho {coeffs.rho:.15g} exceeds "
                                           f"1 - psi' = {1 - coeffs.psi_lower:.15g}")
            if profile.lag == 1 and a > 0 and profile.rho > 1 - a + 1e-10:
                self.violations.append(f"lag=1: rho {profile.rho:.15g} exceeds 1 - a = {1 - a:.15g}")
        self._write_table("mixing", pd.DataFrame(rows))
        self._write_table("mixing_pairs", pd.DataFrame(pairs))

        if self.config.oracle:
            oracle_rows = []
            for lag in lags:
                joint = lag_joint(chain, 1, lag, n)
                coeffs = mixing_coeffs(joint)
                lo, hi = exhaustive_psi(joint)
                oracle_rows.append({"lag": lag, "psi_lower": coeffs.psi_lower, "oracle_lower": lo,
                                    "psi_upper": coeffs.psi_upper, "oracle_upper": hi})
                if abs(lo - coeffs.psi_lower) > ORACLE_TOL or abs(hi - coeffs.psi_upper) > ORACLE_TOL:
                    self.violations.append(f"lag={lag}: atomwise psi differs from event enumeration")
            self._write_table("mixing_oracle", pd.DataFrame(oracle_rows))

    def _run_charfn(self):
        chain = self._chain()
        n = self._length(chain, 10)
        u_grid = self.config.u_grid or np.linspace(-20.0, 20.0, 41).tolist()
        rows = []
        gamma = self.config.gamma
        for u in u_grid:
            report = nagaev_bound(chain, n, float(u), gamma=self.config.gamma)
            gamma = report.gamma
            self.violations.extend(report.violations)
            slack = report.pair_bounds - report.pair_norms
            rows.append({"u": u, "phi_re": report.phi.real, "phi_im": report.phi.imag,
                         "abs4": report.exact_abs4, "product_bound": report.product_bound,
                         "exp_relaxation": report.exp_relaxation,
                         "odd_pair_product": report.odd_pair_product,
                         "even_pair_product": report.even_pair_product,
                         "odd_pair_bound": report.odd_pair_bound,
                         "even_pair_bound": report.even_pair_bound,
                         "min_pair_slack": float(slack.min()) if slack.size else float("nan"),
                         "ok": report.ok})
        self._write_table("charfn", pd.DataFrame(rows))
        self._write_json("charfn.json", {"n": n, "gamma": gamma, "gamma_supplied": self.config.gamma is not None,
                                         "violations": len(self.violations)})

    def _condition_reports(self, chain: ChainSpec):
        cfg = self.config
        n = self._length(chain, 200)
        n_grid = cfg.n_grid or sorted({max(n // 4, 1), max(n // 2, 1), n})
        checks = [cfg.check] if cfg.check else list(ALL_CHAIN_CHECKS)
        interval = cfg.interval or (cfg.u - 0.2, cfg.u + 0.2)
        for check in checks:
            if check == "lindeberg":
                yield lindeberg_profile(chain, cfg.eps, n_grid)
            elif check == "A":
                yield condition_A_profile(chain, cfg.delta, n, u_grid=cfg.u_grid, gamma=cfg.gamma)
            elif check == "A1":
                yield condition_A1_ratio(chain, cfg.delta, n_grid)
            elif check == "B":
                yield condition_B_profile(chain, cfg.u, interval, n_grid, gamma=cfg.gamma)
            elif check == "B2":
                yield condition_B2_statistic(chain, cfg.u, interval, n_grid)
            elif check == "B1":
                yield condition_B1_mass(chain, cfg.u, cfg.eps, cfg.M, n_grid)
            elif check == "c1c2":
                yield c1c2_diagnostics(chain, n, cfg.T, cfg.delta, cfg.L, n_grid=n_grid, gamma=cfg.gamma)
            elif check == "infvar":
                marg = marginals(chain, 1)
                law = DiscreteLaw(effective_observables(chain, marg)[0], marg.at(1))
                x_grid = cfg.x_grid or np.geomspace(0.1, 10 * law.max_abs, 25).tolist()
                yield infvar_diagnostics(law, n_grid, x_grid)

    def _run_conditions(self):
        chain = self._chain()
        verdicts = {}
        for report in self._condition_reports(chain):
            self._write_json(f"condition_{report.name}.json", report.model_dump(mode="json"))
            verdicts[report.name] = report.verdict
            self.violations.extend(f"{report.name}: {line}" for line in report.inequality_failures)
            self.logger.info(f"✅ Condition {report.name}: {report.verdict}")
        self._write_json("conditions.json", {"chain": chain.name, "verdicts": verdicts})

    def _run_llt(self):
        cfg = self.config
        n = cfg.n if cfg.n is not None else 1000
        if cfg.mode == "infvar":
            samples = digit_sums(cfg.paths, n, cfg.seed, observable="infvar", threads=cfg.threads)
        else:
            chain = self._chain()
            lp = None
            if cfg.mode == "weighted":
                weights = cfg.weights or [0.5, 1.0, 2.0]
                lp = LinearProcessSpec(weights=weights, m=min(abs(w) for w in weights),
                                       M=max(abs(w) for w in weights))
            elif cfg.mode == "linear":
                lp = (LinearProcessSpec(coefficients=cfg.coefficients, truncation=cfg.truncation)
                      if cfg.coefficients else LinearProcessSpec.geometric(0.5, truncation=cfg.truncation))
            samples = build_sums(chain, n, cfg.paths, cfg.seed, mode=cfg.mode, lp=lp, threads=cfg.threads)

        h = WindowFunction.from_name(cfg.window, cfg.width)
        u_grid = cfg.u_grid or np.linspace(-2 * samples.norming, 2 * samples.norming, 61).tolist()
        c, d = cfg.interval or (-1.0, 1.0)
        report = llt_scan(samples, h, u_grid)
        interval = interval_scan(samples, c, d, u_grid)
        self._write_table("llt", pd.DataFrame({"u": report.u_grid, "estimate": report.estimate,
                                               "predicted": report.predicted, "stderr": report.stderr}))
        self._write_table("interval", pd.DataFrame({"u": interval.u_grid, "estimate": interval.estimate,
                                                    "predicted": interval.predicted,
                                                    "stderr": interval.stderr}))
        summary = {"mode": cfg.mode, "n": n, "paths": samples.count, "norming": samples.norming,
                   "sup_abs_dev": report.sup_abs_dev, "consistent": report.consistent(),
                   "ks": clt_ks(samples), "interval": [c, d],
                   "interval_sup_abs_dev": interval.sup_abs_dev,
                   "lebesgue_sup": interval.extras["lebesgue_sup"],
                   "interval_inconclusive": interval.inconclusive,
                   "alt_norming": samples.alt_norming}
        if samples.alt_norming:
            summary["sup_abs_dev_by_norming"] = {
                name: llt_scan(samples.renormed(b), h, u_grid, target_stderr=None).sup_abs_dev
                for name, b in sorted(samples.alt_norming.items())
            }
        self._write_json("llt_summary.json", summary)

    def _run_gauss(self):
        cfg = self.config
        samples = sample_digits(cfg.samples, cfg.digits, cfg.seed, threads=cfg.threads)
        digit_chain, bounds = empirical_chain(samples, cfg.cap)
        K = digit_chain.cap
        first = np.bincount(np.minimum(samples.digits[:, 0], K + 1) - 1, minlength=K + 1) / samples.count
        law = digit_law(K)
        self._write_table("digit_marginals", pd.DataFrame({"k": digit_chain.labels(), "empirical": first,
                                                           "analytic": law}))

        (self.out / "digit_chain.json").write_text(
            json.dumps(digit_chain.to_chain().to_file().model_dump(), sort_keys=True, indent=2) + "\n",
            encoding="utf-8")
        self._record(self.out / "digit_chain.json")

        lags = []
        for lag in range(1, min(5, samples.n_digits - 1) + 1):
            coeffs = mixing_coeffs(empirical_lag_joint(samples, min(K, 5), lag))
            lags.append({"lag": lag, "psi_lower": coeffs.psi_lower, "psi_upper": coeffs.psi_upper,
                         "rho": coeffs.rho})
        self._write_table("digit_mixing", pd.DataFrame(lags))
        x = np.array([10.0, 100.0, 1000.0, 10_000.0])
        tail, H = infvar_tail_sums(x)
        self._write_json("gauss_summary.json", {
            "samples": samples.count, "digits": samples.n_digits, "cap": K, "requested_cap": cfg.cap,
            "a": bounds.a, "b": bounds.b, "gamma": bounds.gamma,
            "a_half_width": digit_chain.half_widths[0], "b_half_width": digit_chain.half_widths[1],
            "z": digit_chain.z, "notes": list(digit_chain.notes),
            "infvar_tail": {"x": x.tolist(), "H": H.tolist(), "ratio": (x * x * tail / H).tolist()},
        })


def run(config: RunConfig) -> int:
    return RunWorkflow(config).run()
