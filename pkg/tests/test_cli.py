import json
import subprocess
import sys

import numpy as np
import pytest

from powergan.cli import dispatch
from powergan.cli.config import ENV_SEED, load_run_config
from powergan.data_pipeline import read_dataset
from powergan.errors import IoError


def run_cli(*argv):
    return subprocess.run(
        [sys.executable, "-m", "powergan.cli", *argv],
        capture_output=True, text=True,
    )


# dispatch() is the in-process entry; subprocess checks exercise exit codes


def test_help_exits_zero():
    proc = run_cli("--help")
    assert proc.returncode == 0
    assert "preprocess" in proc.stdout and "generate" in proc.stdout


def test_unknown_subcommand_exits_two():
    proc = run_cli("frobnicate")
    assert proc.returncode == 2


def test_missing_required_flag_exits_two():
    proc = run_cli("preprocess")
    assert proc.returncode == 2
    assert "--csv" in proc.stderr or "csv" in proc.stderr


def test_runtime_error_exits_one(tmp_path):
    rc = dispatch([
        "preprocess", "--csv", str(tmp_path / "absent.csv"),
        "--column-map", str(tmp_path / "absent.json"),
        "--out-dir", str(tmp_path / "out"),
    ])
    assert rc == 1


# ---------------------------------------------------------------- config

def test_config_defaults():
    cfg = load_run_config(env={})
    assert cfg.seed == 0
    assert cfg["data"]["window_length"] == 2240
    assert cfg.net_config().n_z == 100
    assert cfg.schedule().epochs_per_stage == 2000
    assert cfg.loss_config().lambda_gp == 10.0


def test_config_env_seed():
    cfg = load_run_config(env={ENV_SEED: "42"})
    assert cfg.seed == 42
    with pytest.raises(IoError):
        load_run_config(env={ENV_SEED: "not-a-number"})


def test_config_file_beats_env(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[run]\nseed = 7\n\n[schedule]\nepochs_per_stage = 5\nfade_epochs = 2\n")
    cfg = load_run_config(ini, env={ENV_SEED: "42"})
    assert cfg.seed == 7
    assert cfg.schedule().epochs_per_stage == 5


def test_config_flag_beats_file(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[run]\nseed = 7\n")
    cfg = load_run_config(ini, overrides={("run", "seed"): 99}, env={ENV_SEED: "1"})
    assert cfg.seed == 99


def test_config_rejects_unknown_keys(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[run]\nbanana = 1\n")
    with pytest.raises(IoError, match="banana"):
        load_run_config(ini, env={})
    ini.write_text("[fruit]\nseed = 1\n")
    with pytest.raises(IoError, match="fruit"):
        load_run_config(ini, env={})


def test_config_ini_round_trip(tmp_path):
    cfg = load_run_config(env={ENV_SEED: "5"})
    ini = tmp_path / "echo.ini"
    ini.write_text(cfg.to_ini())
    back = load_run_config(ini, env={})
    assert back.seed == 5
    assert back["net"] == cfg["net"]
    assert back["schedule"] == cfg["schedule"]


# ---------------------------------------------------------------- commands

@pytest.fixture(scope="module")
def toy_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("toy")
    rc = dispatch([
        "make-toy-dataset", "--out-dir", str(out), "--seed", "3",
        "--events-per-class", "8",
    ])
    assert rc == 0
    return out


def test_make_toy_dataset_outputs(toy_dir):
    assert (toy_dir / "house.csv").exists()
    assert (toy_dir / "column_map.json").exists()
    stacks, manifest = read_dataset(toy_dir / "windows")
    assert set(stacks) == {"double_pulse", "single_pulse"}
    assert manifest.window_length == 280


def test_make_toy_dataset_reproducible(toy_dir, tmp_path):
    rc = dispatch([
        "make-toy-dataset", "--out-dir", str(tmp_path), "--seed", "3",
        "--events-per-class", "8",
    ])
    assert rc == 0
    assert (tmp_path / "house.csv").read_bytes() == (toy_dir / "house.csv").read_bytes()
    for name in ("double_pulse.pgw", "single_pulse.pgw", "normalization.json"):
        assert (tmp_path / "windows" / name).read_bytes() == (toy_dir / "windows" / name).read_bytes()


def test_preprocess_from_cli(toy_dir, tmp_path, capsys):
    before = (toy_dir / "house.csv").read_bytes()
    out = tmp_path / "windows"
    rc = dispatch([
        "preprocess",
        "--csv", str(toy_dir / "house.csv"),
        "--column-map", str(toy_dir / "column_map.json"),
        "--out-dir", str(out),
        "--window-length", "280",
        "--seed", "3",
    ])
    assert rc == 0
    echoed = capsys.readouterr().out
    assert "[data]" in echoed and "window_length = 280" in echoed
    assert (out / "effective_config.ini").exists()
    stacks, _ = read_dataset(out)
    ref, _ = read_dataset(toy_dir / "windows")
    for label in ref:
        assert np.array_equal(stacks[label], ref[label])
    # inputs are never mutated
    assert (toy_dir / "house.csv").read_bytes() == before


def test_generate_requires_valid_checkpoint(tmp_path):
    rc = dispatch([
        "generate", "--ckpt", str(tmp_path), "--label", "a",
        "--count", "1", "--out", str(tmp_path / "g.csv"),
    ])
    assert rc == 1
