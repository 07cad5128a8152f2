import json
import os

import pytest

from lowertail.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_RESOURCE,
    OUT_ENV_VAR,
    main,
)


def _files(tmp_path):
    return sorted(p.name for p in tmp_path.iterdir())


def test_threshold_subcommand(tmp_path, capsys):
    code = main(["threshold", "--r", "3", "--out", str(tmp_path)])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "eta_r3" in out
    names = _files(tmp_path)
    assert any(n.startswith("threshold-") and n.endswith(".report.csv") for n in names)
    assert any(n.endswith(".meta.json") for n in names)


def test_exact_mode_byte_determinism(tmp_path):
    args = ["sample", "--H", "K3", "--n", "4", "--p", "0.5", "--eta", "0.5",
            "--mode", "exact", "--out", str(tmp_path)]
    assert main(args) == EXIT_OK
    report = next(p for p in tmp_path.iterdir() if p.suffix == ".csv")
    first = report.read_bytes()
    assert main(args) == EXIT_OK
    assert report.read_bytes() == first


def test_mcmc_seed_determinism(tmp_path):
    args = ["sample", "--H", "K3", "--n", "4", "--p", "0.4", "--eta", "0.5",
            "--mode", "mcmc", "--steps", "20000", "--burn-in", "2000",
            "--chains", "2", "--seed", "9", "--out", str(tmp_path)]
    assert main(args) == EXIT_OK
    report = next(p for p in tmp_path.iterdir() if p.suffix == ".csv")
    first = report.read_bytes()
    assert main(args) == EXIT_OK
    assert report.read_bytes() == first


def test_config_file_merge_flags_win(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 4\neta = 0.5\np = 0.5\n")
    out = tmp_path / "rep"
    code = main(["sample", "--H", "K3", "--mode", "exact", "--p", "0.4",
                 "--n", "4", "--config", str(cfg), "--out", str(out)])
    assert code == EXIT_OK
    meta = next(p for p in out.iterdir() if p.suffix == ".json")
    echoed = json.loads(meta.read_text())["config"]
    assert echoed["p"] == "0.4"      # flag beats config file
    assert echoed["eta"] == "0.5"    # config fills the rest


def test_unknown_config_key_is_config_error(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("bogus_key = 1\n")
    code = main(["threshold", "--r", "3", "--config", str(cfg),
                 "--out", str(tmp_path)])
    assert code == EXIT_CONFIG
    assert "error: config:" in capsys.readouterr().err


def test_bad_graph_name_is_config_error(tmp_path, capsys):
    code = main(["solve", "--H", "Z9", "--n", "5", "--eta", "0.5",
                 "--out", str(tmp_path)])
    assert code == EXIT_CONFIG
    assert capsys.readouterr().err.startswith("error: config:")


def test_resource_bound_exit_code(tmp_path, capsys):
    # C(8,2) = 28 slots is over the exact-enumeration bound
    code = main(["sample", "--H", "K3", "--n", "8", "--p", "0.4", "--eta", "0.5",
                 "--mode", "exact", "--out", str(tmp_path)])
    assert code == EXIT_RESOURCE
    assert capsys.readouterr().err.startswith("error: resource:")


def test_env_var_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV_VAR, str(tmp_path))
    code = main(["threshold", "--r", "2"])
    assert code == EXIT_OK
    assert any(p.name.startswith("threshold-") for p in tmp_path.iterdir())


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    capsys.readouterr()
    assert main(["solve", "--help"]) == 0
