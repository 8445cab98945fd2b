import argparse
import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from levymoments.cli import (
    ConfigError,
    EXIT_CONFIG,
    EXIT_FAIL,
    EXIT_OK,
    SEED_ENV,
    default_seed,
    main,
    parse_count,
    parse_grid,
    parse_phi,
    restore_floats,
    to_json,
)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    assert code == EXIT_OK, err
    data = json.loads(out)
    assert data["schema"] == 1
    return data


def csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_grid():
    np.testing.assert_allclose(parse_grid("1e-3:1e3:7"), np.logspace(-3, 3, 7))
    np.testing.assert_allclose(parse_grid("0:1:5:linear"), np.linspace(0, 1, 5))
    np.testing.assert_allclose(parse_grid("0.5,1,2"), [0.5, 1, 2])
    for bad in ("1:2", "a:b:3", "0:1:5:log", "1:10:3:cubic"):
        with pytest.raises(ConfigError):
            parse_grid(bad)


def test_parse_count_and_phi():
    assert parse_count("1e6") == 1_000_000
    assert parse_count("250") == 250
    with pytest.raises(argparse.ArgumentTypeError):
        parse_count("1.5")
    assert parse_phi("stable:0.5")["family"] == "stable-subordinator"
    assert float(parse_phi("gamma:1,2")["beta"]) == 2.0


def test_default_seed(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)
    assert default_seed() == 0
    monkeypatch.setenv(SEED_ENV, "17")
    assert default_seed() == 17


def test_json_round_trip():
    payload = {"a": 1.5, "b": [math.inf, -math.inf], "c": {"d": math.nan, "e": "x"}}
    back = restore_floats(json.loads(to_json(payload)))
    assert back["a"] == 1.5 and back["b"] == [math.inf, -math.inf]
    assert math.isnan(back["c"]["d"]) and back["c"]["e"] == "x"
    assert back["schema"] == 1


@settings(max_examples=30)
@given(st.dictionaries(st.text(min_size=1, max_size=5),
                       st.one_of(st.floats(allow_nan=False), st.integers(), st.text(max_size=5)),
                       max_size=5))
def test_json_round_trip_property(d):
    d = {k: v for k, v in d.items() if k != "schema"}
    back = restore_floats(json.loads(to_json(d)))
    back.pop("schema")
    assert back == d


def test_indices_stable(capsys):
    data = run_json(capsys, "indices", "--family", "stable-subordinator", "--alpha", "0.5")
    assert abs(data["sigma0"] - 0.5) <= 0.02


def test_indices_gamma(capsys):
    data = run_json(capsys, "indices", "--family", "gamma", "--alpha", "1", "--beta", "1")
    assert abs(data["rho_inf"]) <= 0.05


def test_missing_parameter(capsys):
    code, out, err = run(capsys, "indices", "--family", "stable-subordinator")
    assert code == EXIT_CONFIG
    assert "alpha" in err


def test_unknown_flag_is_config_error(capsys):
    code, _, _ = run(capsys, "indices", "--bogus")
    assert code == EXIT_CONFIG


def test_moment_exact(capsys):
    code, out, _ = run(capsys, "moment", "--exact", "--family", "stable-subordinator",
                       "--alpha", "0.5", "--kappa", "-0.25", "--t", "1")
    assert code == EXIT_OK
    rows = csv_rows(out)
    assert len(rows) == 1
    np.testing.assert_allclose(float(rows[0]["value"]), 0.97774, atol=5e-6)


def test_moment_bound_grid(capsys):
    code, out, _ = run(capsys, "moment", "--bound", "thm3.1b", "--family", "gamma",
                       "--kappa", "0.5", "--t-grid", "1e-3:1e3:25:log")
    assert code == EXIT_OK
    rows = csv_rows(out)
    assert len(rows) == 25
    ts = np.array([float(r["t"]) for r in rows])
    vals = np.array([float(r["value"]) for r in rows])
    exact = np.exp(special.gammaln(ts + 0.5) - special.gammaln(ts))
    assert np.all(vals >= exact * (1 - 1e-9))


def test_moment_mc_reproducible(capsys):
    argv = ("moment", "--mc", "--family", "gamma", "--kappa", "0.5", "--t", "1", "--n", "2e4",
            "--seed", "7")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b and a


def test_moment_infinite_reported(capsys):
    data = run_json(capsys, "moment", "--exact", "--family", "brownian", "--d", "1",
                    "--kappa", "-1", "--t", "1")
    row = data["rows"][0]
    assert row["value"] == "inf" and row["status"] == "infinite"


def test_moment_scaling_symmetric_stable(capsys):
    data = run_json(capsys, "moment", "--exact", "--family", "symmetric-stable", "--alpha", "1.5",
                    "--kappa", "0.75", "--t-grid", "1,4")
    v1, v4 = (r["value"] for r in data["rows"])
    np.testing.assert_allclose(v4, 2 * v1, rtol=1e-4)


def test_bound_command(capsys):
    data = run_json(capsys, "bound", "thm3.6a", "--family", "stable-subordinator", "--alpha",
                    "0.5", "--kappa", "-0.25", "--t", "1")
    assert data["rows"][0]["value"] >= 0.97774


def test_bound_sign_checked(capsys):
    code, _, err = run(capsys, "bound", "thm3.6a", "--family", "stable-subordinator",
                       "--alpha", "0.5", "--kappa", "0.25", "--t", "1")
    assert code == EXIT_CONFIG and err


def test_bound_unknown_selector(capsys):
    code, _, _ = run(capsys, "bound", "thm9.9", "--family", "gamma", "--kappa", "0.5")
    assert code == EXIT_CONFIG


def test_table(capsys):
    code, out, _ = run(capsys, "table", "--family", "gamma", "--kappa", "0.5",
                       "--t-grid", "0.1,1,10")
    assert code == EXIT_OK
    rows = csv_rows(out)
    assert len(rows) == 3
    assert "thm3.1b" in rows[0]
    for r in rows:
        assert float(r["thm3.1b"]) >= float(r["exact"])


def test_harnack_log(capsys):
    data = run_json(capsys, "harnack", "log", "--phi", "stable:0.5", "--kappa1", "1",
                    "--kappa2", "0.25", "--C", "1,1,1", "--case", "auto", "--t", "1")
    assert data["case_used"] in ("a", "b", "c")
    assert data["value"] > 1.0
    assert "C_kappa1_rho" in data["constants"]


def test_harnack_log_hypothesis_failure(capsys):
    code, _, err = run(capsys, "harnack", "log", "--phi", "stable:0.5", "--kappa1", "1",
                       "--kappa2", "0.5", "--C", "1,1,1", "--case", "a", "--t", "1")
    assert code == EXIT_CONFIG
    assert "H2" in err


def test_harnack_power(capsys):
    data = run_json(capsys, "harnack", "power", "--phi", "tstable:0.8", "--kappa1", "1",
                    "--kappa2", "0.5", "--H", "1,1,1", "--p", "2", "--r", "2", "--t", "1")
    assert math.isfinite(data["value"])


def test_harnack_sde(capsys):
    data = run_json(capsys, "harnack", "sde", "--gamma", "1", "--K", "0", "--e", "0.5",
                    "--t", "2")
    np.testing.assert_allclose(data["log_exponent"], 0.25 / 4, rtol=1e-10)


def test_verify_divergence(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "divergence", "--format", "json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert all(r["passed"] for s in data["suites"] for r in s["rows"])


def test_verify_domination_family(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "domination", "--family", "gamma",
                       "--n", "2e4", "--format", "csv")
    assert code == EXIT_OK
    rows = csv_rows(out)
    assert rows and all(r["passed"] == "True" for r in rows)


def test_verify_unknown_suite(capsys):
    code, _, _ = run(capsys, "verify", "--suite", "nonsense")
    assert code == EXIT_CONFIG


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# run settings\nfamily = stable-subordinator\nalpha = 0.5\nkappa = -0.25\n"
                   "t = 1\nformat = json\n")
    data = json.loads(run(capsys, "moment", "--config", str(cfg))[1])
    np.testing.assert_allclose(data["rows"][0]["value"], 0.97774, atol=5e-6)
    data = json.loads(run(capsys, "moment", "--config", str(cfg), "--alpha", "0.8")[1])
    assert data["params"]["alpha"] == 0.8


def test_config_file_missing(capsys):
    code, _, _ = run(capsys, "moment", "--config", "/nonexistent/run.cfg")
    assert code == EXIT_CONFIG


def test_exit_fail_constant():
    assert (EXIT_OK, EXIT_FAIL, EXIT_CONFIG) == (0, 1, 2)
