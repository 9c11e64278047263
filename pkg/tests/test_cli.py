import csv
import json

import pytest

from dibkit.cli import run


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_estimate_subcommand(tmp_path, capsys):
    code = run(
        [
            "estimate", "--theta-hat", "0", "--n", "100", "--beta-hat", "1", "--m", "400",
            "--estimators", "mle,pooled,ammse", "--out-dir", str(tmp_path),
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("config: ")
    echoed = json.loads(out.splitlines()[0][len("config: "):])
    assert echoed["subcommand"] == "estimate" and echoed["n"] == 100
    rows = read_csv(tmp_path / "estimates.csv")
    assert rows[0] == ["estimator", "theta_est", "delta_est", "gamma_est", "weight"]
    by_name = {r[0]: r for r in rows[1:]}
    assert float(by_name["ammse"][1]) == pytest.approx(0.009876543, abs=1e-8)
    assert float(by_name["pooled"][1]) == pytest.approx(0.8)


def test_estimate_requires_inputs(tmp_path, capsys):
    code = run(["estimate", "--n", "100", "--out-dir", str(tmp_path)])
    assert code == 2
    err = capsys.readouterr().err
    assert json.loads(err.splitlines()[-1])["error"] == "ConfigError"


def test_estimate_ommse_needs_delta(tmp_path):
    code = run(
        [
            "estimate", "--theta-hat", "0", "--n", "10", "--beta-hat", "1", "--m", "10",
            "--estimators", "ommse", "--out-dir", str(tmp_path),
        ]
    )
    assert code == 2


def test_srmse_curve_deterministic(tmp_path):
    args = [
        "srmse-curve", "--n", "200", "--m", "2000", "--estimators", "mle,pooled,ammse",
        "--grid-points", "5", "--sqrt-n-delta-max", "4", "--svg",
        "--out-dir", str(tmp_path),
    ]
    assert run(args) == 0
    first_csv = (tmp_path / "srmse_curve.csv").read_bytes()
    first_svg = (tmp_path / "srmse_curve.svg").read_bytes()
    assert run(args) == 0
    assert (tmp_path / "srmse_curve.csv").read_bytes() == first_csv
    assert (tmp_path / "srmse_curve.svg").read_bytes() == first_svg
    rows = read_csv(tmp_path / "srmse_curve.csv")
    assert rows[0] == ["estimator", "sqrt_n_delta", "srmse"]
    mle_rows = [r for r in rows[1:] if r[0] == "mle"]
    assert all(float(r[2]) == pytest.approx(1.0, abs=1e-9) for r in mle_rows)


def test_bayes_risk_table_small(tmp_path):
    assert (
        run(
            [
                "bayes-risk-table", "--n", "200", "--m", "2000",
                "--estimators", "mle,pooled", "--priors", "pi1,pi4",
                "--out-dir", str(tmp_path),
            ]
        )
        == 0
    )
    rows = read_csv(tmp_path / "bayes_risk_table.csv")
    assert rows[0] == ["estimator", "prior", "value"]
    values = {(r[0], r[1]): float(r[2]) for r in rows[1:]}
    assert values[("mle", "pi1")] == pytest.approx(1.0, abs=0.01)
    assert values[("pooled", "pi1")] < 1.0


def test_power_subcommand(tmp_path):
    assert (
        run(
            [
                "power", "--n", "200", "--m", "2000", "--estimators", "mle,ammse",
                "--convention", "delta-bounded", "--delta0", "0.1",
                "--theta", "0.1", "--grid-points", "5", "--out-dir", str(tmp_path),
            ]
        )
        == 0
    )
    rows = read_csv(tmp_path / "power.csv")
    assert rows[0] == ["estimator", "convention", "theta", "delta", "critical", "rejection_prob"]
    assert all(0.0 <= float(r[5]) <= 1.0 for r in rows[1:])
    assert {r[1] for r in rows[1:]} == {"delta-bounded"}


def test_densities_worker_invariance(tmp_path):
    base = [
        "densities", "--n", "200", "--m", "2000", "--estimators", "mle,pooled,ammse",
        "--sqrt-n-delta", "0,1.58", "--replicates", "4000", "--grid-points", "33",
        "--seed", "5",
    ]
    assert run(base + ["--out-dir", str(tmp_path / "w1"), "--workers", "1"]) == 0
    assert run(base + ["--out-dir", str(tmp_path / "w8"), "--workers", "8"]) == 0
    assert (tmp_path / "w1" / "densities.csv").read_bytes() == (
        tmp_path / "w8" / "densities.csv"
    ).read_bytes()
    rows = read_csv(tmp_path / "w1" / "densities.csv")
    assert rows[0] == ["estimator", "sqrt_n_delta_scenario", "x", "log_density"]


def test_example_prams_report(tmp_path, capsys):
    assert (
        run(
            [
                "example-prams", "--resamples", "5000", "--mc-draws", "20000",
                "--delta0-list", "0.05", "--out-dir", str(tmp_path), "--seed", "11",
            ]
        )
        == 0
    )
    rows = read_csv(tmp_path / "prams_report.csv")
    values = {(r[0], r[1]): r[2] for r in rows[1:]}
    assert float(values[("estimate_rate", "rate")]) == pytest.approx(0.3858, abs=5e-4)
    assert float(values[("p_option1", "probability")]) == pytest.approx(0.1158, abs=5e-4)
    assert float(values[("z1", "standardized")]) == pytest.approx(1.1963, abs=5e-4)
    assert ("tipping_point", "standardized-conflict") in values
    out = capsys.readouterr().out
    assert "bootstrap CI" in out


def test_asymptotics_check(tmp_path):
    assert (
        run(
            [
                "asymptotics-check", "--n", "500", "--m", "5000",
                "--estimators", "mle,pooled", "--h", "0", "--draws", "20000",
                "--out-dir", str(tmp_path),
            ]
        )
        == 0
    )
    rows = read_csv(tmp_path / "asymptotics_check.csv")
    assert rows[0] == ["estimator", "h", "ks_distance", "threshold", "status"]
    assert all(r[4] == "pass" for r in rows[1:])


def test_config_file_and_override(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"n": 100, "m": 400, "theta_hat": 0.0, "beta_hat": 1.0,
                                  "estimators": ["pooled"]}))
    out_dir = tmp_path / "out"
    assert run(["estimate", "--config", str(config), "--out-dir", str(out_dir)]) == 0
    rows = read_csv(out_dir / "estimates.csv")
    assert rows[1][0] == "pooled"
    # explicit flag overrides the file
    assert run(
        ["estimate", "--config", str(config), "--beta-hat", "3.0", "--out-dir", str(out_dir)]
    ) == 0
    rows = read_csv(out_dir / "estimates.csv")
    assert float(rows[1][1]) == pytest.approx(0.8 * 3.0)


def test_unknown_config_key_rejected(tmp_path, capsys):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"n": 100, "bogus": 1}))
    code = run(["estimate", "--config", str(config), "--out-dir", str(tmp_path)])
    assert code == 2
    assert "bogus" in capsys.readouterr().err


def test_out_dir_env_default(tmp_path, monkeypatch):
    monkeypatch.setenv("DIBKIT_OUTPUT_DIR", str(tmp_path / "env_out"))
    assert run(
        ["estimate", "--theta-hat", "0", "--n", "10", "--beta-hat", "1", "--m", "10",
         "--estimators", "mle"]
    ) == 0
    assert (tmp_path / "env_out" / "estimates.csv").exists()


def test_unknown_subcommand_is_config_error():
    assert run(["no-such-command"]) == 2
