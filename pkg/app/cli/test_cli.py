#!/usr/bin/env python3
# Copyright (c) 2025 Heemeng Foo
# SPDX-License-Identifier: BUSL-1.1
# See the LICENSE file for usage restrictions and the 2029-08-20 Apache-2.0 conversion.

"""
End-to-end tests for the mixllt command line and its exit-status contract.
"""

import argparse
import hashlib
import json

import pandas as pd
import pytest
from pydantic import ValidationError

from app.chain import load_chain
from app.cli import main
from app.cli.main import parse_grid, parse_lags
from app.cli.models import RunConfig


@pytest.fixture(autouse=True)
def no_thread_override(monkeypatch):
    monkeypatch.delenv("MIXLLT_THREADS", raising=False)


def _manifest(out):
    return json.loads((out / "manifest.json").read_text(encoding="utf-8"))


def test_flag_parsers():
    assert parse_lags("1..5") == [1, 2, 3, 4, 5]
    assert parse_lags("1,3") == [1, 3]
    assert parse_grid("-2:2:5") == [-2.0, -1.0, 0.0, 1.0, 2.0]
    assert parse_grid("0.5,1") == [0.5, 1.0]


@pytest.mark.parametrize("text", ["5..1", "0..3", ",", "1,-2"])
def test_parse_lags_rejects_empty_or_non_positive(text):
    with pytest.raises(argparse.ArgumentTypeError):
        parse_lags(text)


def test_reversed_lag_range_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["mixing", "--builtin", "reference", "--lags", "5..1"])
    assert exc.value.code == 2
    assert "empty lag range" in capsys.readouterr().err


def test_run_config_rejects_empty_lags_and_zero_length():
    with pytest.raises(ValidationError):
        RunConfig(command="mixing", builtin="reference", lags=[])
    with pytest.raises(ValidationError):
        RunConfig(command="llt", builtin="reference", n=0)
    with pytest.raises(ValidationError):
        RunConfig(command="mixing", builtin="reference", no_such_field=1)


def test_zero_length_llt_is_a_usage_error(tmp_path, capsys):
    assert main(["llt", "--builtin", "reference", "--n", "0", "--out", str(tmp_path)]) == 2
    assert "n:" in capsys.readouterr().err
    assert not (tmp_path / "llt.csv").exists()


def test_mixing_writes_one_row_per_lag(tmp_path):
    out = tmp_path / "run"
    assert main(["mixing", "--builtin", "reference", "--lags", "1..5", "--out", str(out)]) == 0
    table = pd.read_csv(out / "mixing.csv")
    assert list(table["lag"]) == [1, 2, 3, 4, 5]
    assert (table["bradley_gap"] >= -1e-10).all()
    assert table["rho"].is_monotonic_decreasing

    manifest = _manifest(out)
    assert manifest["exit_status"] == 0
    assert manifest["schema_version"] == "1.0"
    assert "threads" not in manifest["config"]
    recorded = {a["path"]: a["sha256"] for a in manifest["artifacts"]}
    assert recorded["mixing.csv"] == hashlib.sha256((out / "mixing.csv").read_bytes()).hexdigest()
    assert "mixing_pairs.csv" in recorded


def test_mixing_oracle_agrees(tmp_path):
    assert main(["mixing", "--builtin", "lattice", "--lags", "1,2", "--oracle", "--out", str(tmp_path)]) == 0
    oracle = pd.read_csv(tmp_path / "mixing_oracle.csv")
    assert (oracle["psi_lower"] - oracle["oracle_lower"]).abs().max() <= 1e-12


def test_json_format(tmp_path):
    assert main(["mixing", "--builtin", "two-state", "--lags", "1..2", "--format", "json", "--out", str(tmp_path)]) == 0
    body = json.loads((tmp_path / "mixing.json").read_text(encoding="utf-8"))
    assert body["schema_version"] == "1.0"
    assert [row["lag"] for row in body["rows"]] == [1, 2]


def test_non_stochastic_row_is_a_usage_error(tmp_path, capsys):
    spec = tmp_path / "chain.json"
    spec.write_text(json.dumps({"states": 2, "initial": [0.5, 0.5], "kernels": [[0.5, 0.6], [0.5, 0.5]],
                                "observables": [0.0, 1.0]}), encoding="utf-8")
    assert main(["mixing", "--spec", str(spec), "--out", str(tmp_path / "run")]) == 2
    assert "row 0" in capsys.readouterr().err
    assert _manifest(tmp_path / "run")["exit_status"] == 2


def test_non_utf8_chain_file_is_a_usage_error(tmp_path, capsys):
    spec = tmp_path / "chain.json"
    spec.write_bytes(b"\xff\xfe{\"x\":1}")
    assert main(["validate", "--spec", str(spec), "--out", str(tmp_path / "run")]) == 2
    err = capsys.readouterr().err
    assert "not UTF-8" in err
    assert "Traceback" not in err
    assert _manifest(tmp_path / "run")["exit_status"] == 2


def test_missing_chain_source_is_a_usage_error(tmp_path, capsys):
    assert main(["charfn", "--out", str(tmp_path)]) == 2
    assert "--builtin" in capsys.readouterr().err


def test_unknown_flag_rejected():
    with pytest.raises(SystemExit) as exc:
        main(["mixing", "--builtin", "reference", "--no-such-flag"])
    assert exc.value.code == 2


def test_mis_supplied_gamma_fails_with_offending_u(tmp_path, capsys):
    status = main(["charfn", "--builtin", "reference", "--gamma", "50", "--n", "3",
                   "--u-grid", "0,0.5", "--out", str(tmp_path)])
    assert status == 1
    err = capsys.readouterr().err
    assert "u=0.5" in err
    assert "u=0:" not in err
    violations = json.loads((tmp_path / "violations.json").read_text(encoding="utf-8"))["violations"]
    assert all(line.startswith("u=0.5") for line in violations)
    table = pd.read_csv(tmp_path / "charfn.csv")
    assert list(table["ok"]) == [True, False]


def test_charfn_default_grid_passes(tmp_path):
    assert main(["charfn", "--builtin", "reference", "--out", str(tmp_path)]) == 0
    table = pd.read_csv(tmp_path / "charfn.csv")
    assert len(table) == 41
    assert (table["abs4"] <= table["product_bound"] + 1e-10).all()

    small = tmp_path / "small"
    assert main(["charfn", "--builtin", "reference", "--u-min", "-1", "--u-max", "1", "--u-steps", "3",
                 "--out", str(small)]) == 0
    assert list(pd.read_csv(small / "charfn.csv")["u"]) == [-1.0, 0.0, 1.0]


def test_validate_prints_summary(tmp_path, capsys):
    assert main(["validate", "--builtin", "reference", "--n", "50", "--out", str(tmp_path)]) == 0
    assert "3 states" in capsys.readouterr().out
    summary = json.loads((tmp_path / "validate.json").read_text(encoding="utf-8"))
    assert summary["sandwich"][0] <= summary["ratio"] <= summary["sandwich"][1]
    assert load_chain(tmp_path / "chain.json").size == 3


def test_conditions_single_check(tmp_path):
    assert main(["conditions", "--builtin", "reference", "--check", "lindeberg", "--n-grid", "10,50,200",
                 "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "condition_lindeberg.json").read_text(encoding="utf-8"))
    assert report["grid"] == [10, 50, 200]
    assert report["schema_version"] == "1.0"


def test_gauss_artifacts(tmp_path):
    assert main(["gauss", "--samples", "20000", "--digits", "6", "--cap", "5", "--out", str(tmp_path)]) == 0
    assert load_chain(tmp_path / "digit_chain.json").size == 6
    marginals = pd.read_csv(tmp_path / "digit_marginals.csv")
    assert marginals["analytic"].sum() == pytest.approx(1.0, abs=1e-12)
    summary = json.loads((tmp_path / "gauss_summary.json").read_text(encoding="utf-8"))
    assert summary["cap"] == 5
    trend = summary["infvar_tail"]
    assert trend["x"][-1] == 10_000.0
    assert all(b < a for a, b in zip(trend["ratio"], trend["ratio"][1:]))


@pytest.mark.parametrize("command", [
    ["simulate", "--builtin", "reference", "--n", "20", "--paths", "3000"],
    ["llt", "--builtin", "reference", "--n", "50", "--paths", "20000"],
])
def test_artifacts_identical_across_thread_counts(tmp_path, command):
    one, many = tmp_path / "one", tmp_path / "many"
    assert main(command + ["--seed", "7", "--threads", "1", "--out", str(one)]) == 0
    assert main(command + ["--seed", "7", "--threads", "4", "--out", str(many)]) == 0
    first = {a["path"]: a["sha256"] for a in _manifest(one)["artifacts"]}
    second = {a["path"]: a["sha256"] for a in _manifest(many)["artifacts"]}
    assert first == second
    for name in first:
        assert (one / name).read_bytes() == (many / name).read_bytes()
