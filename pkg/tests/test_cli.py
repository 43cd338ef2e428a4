import subprocess
import sys

import numpy as np
import pytest

from lmtrans.cli import main


def test_theory_command(capsys):
    assert main(["theory", "--d", "0.4", "--k", "2"]) == 0
    assert capsys.readouterr().out.strip() == "LM(0.3)"
    assert main(["theory", "--d", "0.75", "--type1"]) == 0
    assert capsys.readouterr().out.strip() == "LM(0.75)"
    assert main(["theory", "--d", "0.4"]) == 1


def test_usage_errors_exit_1(capsys):
    assert main([]) == 1
    assert main(["simulate", "--d", "0.3"]) == 1
    assert main(["simulate", "--d", "0.9", "--n", "100"]) == 1
    assert main(["--threads", "0", "theory", "--d", "0.3", "--k", "1"]) == 1


def test_simulate_transform_estimate(tmp_path, capsys):
    path = tmp_path / "x.csv"
    assert main(["simulate", "--d", "0.3", "--n", "4096", "--law", "gaussian", "--seed", "3", "--out", str(path)]) == 0
    assert (tmp_path / "x.csv.json").exists()
    x = np.loadtxt(path)
    assert x.shape == (4096,)
    sq = tmp_path / "sq.csv"
    assert main(["transform", "--input", str(path), "--transform", "pow:2", "--out", str(sq)]) == 0
    assert np.allclose(np.loadtxt(sq), x**2)
    assert main(["estimate", "--input", str(path)]) == 0
    out = capsys.readouterr().out
    d_hat = float(out.split()[0].split("=")[1])
    assert abs(d_hat - 0.3) < 0.15
    assert main(["estimate", "--input", str(tmp_path / "missing.csv")]) == 1


def test_simulate_seed_flag_position(capsys):
    main(["--seed", "5", "simulate", "--d", "0.2", "--n", "16"])
    before = capsys.readouterr().out
    main(["simulate", "--d", "0.2", "--n", "16", "--seed", "5"])
    assert capsys.readouterr().out == before


def test_rank_command(capsys):
    assert main(["rank", "--transform", "poly:0,-3,0,1", "--samples", "200000"]) == 0
    assert capsys.readouterr().out.startswith("rank=3")


def test_table_print_config_and_config_run(tmp_path, capsys):
    cfg = tmp_path / "t.cfg"
    assert main(["table", "T1", "--scale", "0.01", "--print-config", "--out", str(cfg)]) == 0
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["table", "T1", "--scale", "0.01", "--out", str(out1)]) == 0
    assert main(["--config", str(cfg), "table", "--threads", "2", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert main(["table"]) == 1
    bad = tmp_path / "bad.cfg"
    bad.write_text("[experiment]\nn = 10\n")
    assert main(["table", "--config", str(bad)]) == 1


def test_verify_quick_exit_code(tmp_path):
    report = tmp_path / "v.csv"
    assert main(["verify", "--quick", "--threads", "4", "--out", str(report)]) == 0
    lines = report.read_text().splitlines()
    assert len(lines) > 10


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "lmtrans", "theory", "--d", "-0.4", "--k", "2"], capture_output=True, text=True
    )
    assert res.returncode == 0
    assert res.stdout.strip() == "LM(0)"


def test_verify_failure_exit_2(monkeypatch, capsys):
    from lmtrans import verification

    failing = [verification.CheckReport("broken", {}, 1.0, 0.0, 1e-9)]
    monkeypatch.setattr(verification, "run_all", lambda quick, threads: failing)
    assert main(["verify", "--quick"]) == 2
    assert "broken" in capsys.readouterr().err
