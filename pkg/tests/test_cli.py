import json
import subprocess
import sys

import numpy as np
import pytest

from panelroot import spectra
from panelroot.cli import main


@pytest.fixture
def panel_csv(tmp_path):
    path = tmp_path / "panel.csv"
    assert main(["simulate", "--n", "15", "--T", "20", "--seed", "4", "--burn-in", "30", "--out", str(path)]) == 0
    return path


def test_simulate_writes_panel(panel_csv):
    X = np.loadtxt(panel_csv, delimiter=",")
    assert X.shape == (15, 20)


def test_simulate_stdout_matches_file(panel_csv, capsys):
    assert main(["simulate", "--n", "15", "--T", "20", "--seed", "4", "--burn-in", "30"]) == 0
    assert capsys.readouterr().out == panel_csv.read_text()


def test_test_command(panel_csv, capsys, moments):
    assert main(["test", "--input", str(panel_csv), "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["n"] == 15 and out["T"] == 20
    assert out["reject"] == (abs(out["statistic"]) >= out["threshold"])
    assert out["limit_ref"] == moments.source
    assert main(["test", "--input", str(panel_csv)]) == 0
    assert "decision" in capsys.readouterr().out


def test_validation_exit_codes(tmp_path, panel_csv, capsys):
    assert main(["test", "--input", str(tmp_path / "absent.csv")]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2,x\n3,4,5\n")
    assert main(["test", "--input", str(bad)]) == 2
    flat = tmp_path / "flat.csv"
    flat.write_text("1,2,3\n4,4,4\n")
    assert main(["test", "--input", str(flat)]) == 2
    assert main(["test", "--input", str(panel_csv), "--limits", str(tmp_path / "none.json")]) == 2
    assert main(["experiment", "--n", "3", "--reps", "1"]) == 2
    assert "error:" in capsys.readouterr().err


def test_numeric_exit_code(panel_csv, monkeypatch):
    monkeypatch.setattr(spectra, "MAX_SWEEPS", 0)
    assert main(["test", "--input", str(panel_csv)]) == 3


def test_numeric_failure_inside_experiment(monkeypatch):
    monkeypatch.setattr(spectra, "MAX_SWEEPS", 0)
    assert main(["experiment", "--n", "8", "--T", "8", "--reps", "2"]) == 3


def test_experiment_with_config(tmp_path, capsys):
    cfg = tmp_path / "row.cfg"
    cfg.write_text("n = 10\nT = 12\nreps = 30\nseed = 5\n")
    out = tmp_path / "row.csv"
    assert main(["experiment", "--config", str(cfg), "--T", "14", "--out", str(out), "--json"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert (row["n"], row["T"]) == (10, 14)
    side = json.loads(out.with_suffix(".json").read_text())
    assert side["config"]["seed"] == 5 and side["config"]["reps"] == 30


def test_experiment_csv_is_worker_invariant(capsys):
    args = ["experiment", "--n", "10", "--T", "12", "--reps", "30", "--seed", "2"]
    assert main(args) == 0
    one = capsys.readouterr().out
    assert main(args + ["--workers", "2"]) == 0
    assert capsys.readouterr().out == one
    assert one.splitlines()[0].startswith("n,T,log_n")


def test_limits(tmp_path, capsys):
    out = tmp_path / "lim.json"
    assert main(["limits", "--K", "2", "--N", "40", "--samples", "10000", "--out", str(out)]) == 0
    printed = json.loads(capsys.readouterr().out)
    assert json.loads(out.read_text()) == printed
    assert printed["K"] == 2 and printed["samples"] == 10000


def test_diagnostics(capsys):
    assert main(["diagnostics", "--grid", "16x20", "--reps", "2", "--K", "2", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert [(r["n"], r["T"], r["k"]) for r in report["rows"]] == [(16, 20, 1), (16, 20, 2)]


def test_verify(capsys):
    assert main(["verify"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)


def test_bad_seed():
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--seed", "-1"])
    assert info.value.code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "panelroot.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.startswith("panelroot ")
