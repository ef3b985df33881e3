import json

import numpy as np
from click.testing import CliRunner

from roundvol.cli import main


def run(args, **kw):
    return CliRunner().invoke(main, args, catch_exceptions=False, **kw)


def simulate_csv(tmp_path, n=1024, alpha=2**-6, seed=4):
    out = tmp_path / "obs.csv"
    res = run([
        "simulate", "--model", "constant", "--params", "1.0",
        "--n", str(n), "--alpha", str(alpha), "--seed", str(seed),
        "--out", str(out),
    ])
    assert res.exit_code == 0, res.output
    return out


def test_simulate_writes_csv(tmp_path):
    out = simulate_csv(tmp_path)
    lines = out.read_text().splitlines()
    assert lines[0].startswith("#")
    assert lines[1] == "index,time,value"
    assert len(lines) == 2 + 1024 + 1


def test_simulate_rejects_bad_alpha():
    res = run(["simulate", "--n", "256", "--alpha", "-1"])
    assert res.exit_code == 2


def test_estimate_tilde_round_trip(tmp_path):
    csv = simulate_csv(tmp_path)
    res = run(["estimate", "--in", str(csv), "--alpha", str(2**-6)])
    assert res.exit_code == 0, res.output
    payload = json.loads(res.output)
    assert payload["estimator_kind"] == "theta_tilde"
    assert abs(payload["theta_hat"] - 1.0) < 0.5


def test_estimate_hat_with_plan_override(tmp_path):
    csv = simulate_csv(tmp_path, n=4096, alpha=2**-8)
    res = run([
        "estimate", "--in", str(csv), "--alpha", str(2**-8),
        "--estimator", "hat", "--plan", "0.5,4,3,5",
    ])
    assert res.exit_code == 0, res.output
    payload = json.loads(res.output)
    assert payload["plan"]["j1"] == 4
    assert payload["plan"]["j2"] == 3


def test_estimate_rv_modes(tmp_path):
    csv = simulate_csv(tmp_path)
    for mode in ("rv", "rvlog"):
        res = run(["estimate", "--in", str(csv), "--alpha", str(2**-6),
                   "--estimator", mode])
        if mode == "rv":
            assert res.exit_code == 0
            assert json.loads(res.output)["theta_hat"] > 0
        else:
            # the constant model at x0 = 0 produces nonpositive levels
            assert res.exit_code == 2


def test_mc_rate_end_to_end(tmp_path):
    cfg = {
        "model": {"name": "constant", "params": [1.0], "x0": 0.0,
                  "drift_mode": "assumption_D"},
        "weight": {"name": "absolute"},
        "gamma": 0.5,
        "n_list": [1024, 2048, 4096],
        "replications": 8,
        "seed": 2,
        "estimators": ["theta_tilde"],
    }
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps(cfg))
    out = tmp_path / "report.json"
    res = run(["mc-rate", "--config", str(cfg_file), "--out", str(out)])
    assert res.exit_code == 0, res.output
    report = json.loads(out.read_text())
    assert report["kind"] == "mc-rate"
    assert len(report["rows"]) == 3
    # byte identical on a second run
    out2 = tmp_path / "report2.json"
    res2 = run(["mc-rate", "--config", str(cfg_file), "--out", str(out2)])
    assert res2.exit_code == 0
    assert out.read_text() == out2.read_text()


def test_mc_rate_bad_config(tmp_path):
    cfg_file = tmp_path / "bad.json"
    cfg_file.write_text(json.dumps({
        "model": {"name": "constant", "params": [1.0]},
        "weight": {"name": "absolute"},
        "gamma": 0.5, "n_list": [1000], "replications": 4, "seed": 0,
        "estimators": ["theta_tilde"],
    }))
    res = run(["mc-rate", "--config", str(cfg_file)])
    assert res.exit_code == 2


def test_delta_beta_command():
    res = run(["delta-beta", "--beta", "0.5", "--sigma", "1.0",
               "--replications", "120", "--n-inner", "512"])
    assert res.exit_code == 0, res.output
    lines = res.output.strip().splitlines()
    assert lines[0] == "beta,sigma,value,std_error"
    beta, sigma, value, se = map(float, lines[1].split(","))
    assert value > 0 and se > 0


def test_gamma_p_command():
    res = run(["gamma-p", "--sigma", "1.0", "--beta", "2.0", "--p", "1.0"])
    assert res.exit_code == 0, res.output
    val = float(res.output.strip().splitlines()[-1].split(",")[-1])
    assert abs(val - np.sqrt(2.0 / np.pi)) < 1e-9
