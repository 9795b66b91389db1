import csv
import io
import json
import subprocess
import sys

import pytest

from replicable_online.cli import main
from replicable_online.harness import CSV_COLUMNS


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_run_json_has_blocks(capsys):
    code, out, _ = run_cli(capsys, "run", "--alg", "iid-experts", "--T", "256", "--n", "2",
                           "--rho", "0.25")
    data = json.loads(out)
    assert code == 0 and len(data["actions"]) == 256
    assert [b["length"] for b in data["blocks"]] == [16, 64, 128, 48]
    assert data["blocks"][0]["expert"] == 0 and data["blocks"][0]["eps"] is None


def test_run_csv(capsys):
    code, out, _ = run_cli(capsys, "run", "--alg", "fllb", "--T", "50", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["t", "action", "cost"] and len(rows) == 51


def test_paired(capsys):
    code, out, _ = run_cli(capsys, "paired", "--alg", "ftpl", "--T", "200",
                           "--adversary", "fll-counterexample", "--seed", "0")
    data = json.loads(out)
    assert data["identical"] == (data["first_divergence"] is None)


def test_replicability_json(capsys):
    _, out, _ = run_cli(capsys, "replicability", "--alg", "ftplbs", "--T", "100", "--trials", "10")
    data = json.loads(out)
    assert data["trials"] == 10 and data["ci_low"] <= data["point_estimate"] <= data["ci_high"]


def test_regret_csv(capsys):
    _, out, _ = run_cli(capsys, "regret", "--alg", "ftplb", "--T", "100", "--B", "5",
                        "--eps", "0.05", "--trials", "4", "--format", "csv")
    assert out.splitlines()[0] == "trial,regret" and len(out.splitlines()) == 5


def test_sweep_writes_csv(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"axes": {"alg": ["fllb"], "T": [100], "n": [2], "rho": [0.2, 0.3],
                                        "adversary": ["mixed"]}, "trials": 5, "master_seed": 3}))
    out = tmp_path / "out.csv"
    code, _, _ = run_cli(capsys, "sweep", "--config", str(cfg), "--format", "csv", "--out", str(out))
    rows = list(csv.reader(out.open()))
    assert code == 0 and tuple(rows[0]) == CSV_COLUMNS and len(rows) == 3


def test_config_mirrors_flags(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alg": "ftplbs", "T": 40, "n": 3}))
    _, out, _ = run_cli(capsys, "run", "--config", str(cfg))
    data = json.loads(out)
    assert data["alg"] == "ftplbs" and data["T"] == 40 and data["n"] == 3


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"horizon": 40}))
    code, _, err = run_cli(capsys, "run", "--config", str(cfg))
    assert code == 2 and "horizon" in err


def test_tradeoff(capsys):
    _, out, _ = run_cli(capsys, "tradeoff", "--T", "100", "--taus", "0.1", "--rhos", "0.3",
                        "--trials", "4", "--format", "csv")
    assert out.splitlines()[0].startswith("alg,rho,B,eps,tau,sign")
    assert len(out.splitlines()) == 3


def test_tradeoff_rejects_quarter(capsys):
    code, _, err = run_cli(capsys, "tradeoff", "--T", "100", "--taus", "0.25")
    assert code == 2 and "domain" in err


def test_adversary_file(tmp_path, capsys):
    adv = tmp_path / "adv.json"
    adv.write_text(json.dumps({"norm": "linf", "steps": [
        {"repeat": 30, "steps": [{"kind": "point_mass", "cost": [0, 1]}]}]}))
    _, out, _ = run_cli(capsys, "run", "--alg", "ftplbs", "--T", "30", "--adversary", str(adv))
    assert json.loads(out)["total_cost"] in (0.0, 30.0)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "replicable_online", "--help"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    for cmd in ("run", "paired", "replicability", "regret", "sweep", "tradeoff"):
        assert cmd in res.stdout
