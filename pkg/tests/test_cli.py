import json
import os

import numpy as np
import pytest

from skynoma.cli import main

FAST = ["train.episodes=2", "train.steps_per_episode=10",
        "train.batch_size=8", "train.buffer_capacity=64",
        "train.target_sync=30"]


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def read_manifest(out_dir):
    with open(os.path.join(out_dir, "manifest.json")) as fh:
        return json.load(fh)


def read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


def train_once(tmp_path, capsys, name="run", extra=(), seed="0"):
    out = str(tmp_path / name)
    code, stdout, _ = run(capsys, "train", "--out", out, "--seed", seed,
                          "--episodes", "2", "--steps", "10",
                          "--no-figures", *extra,
                          "train.batch_size=8", "train.buffer_capacity=64",
                          "train.target_sync=30")
    assert code == 0, stdout
    return out


def test_train_writes_artifacts_and_row_count(tmp_path, capsys):
    out = train_once(tmp_path, capsys)
    assert os.path.exists(os.path.join(out, "checkpoint.npz"))
    lines = read_bytes(os.path.join(out, "episodes.csv")).decode().splitlines()
    assert len(lines) == 1 + 2  # header + one row per episode
    manifest = read_manifest(out)
    assert manifest["command"] == "train"
    assert manifest["seed"] == 0
    assert manifest["config"]["train"]["episodes"] == 2
    assert len(manifest["config_sha256"]) == 64
    assert manifest["duration_s"] > 0.0


def test_train_rerun_byte_identical_csv(tmp_path, capsys):
    a = train_once(tmp_path, capsys, "a", extra=("--trace",))
    b = train_once(tmp_path, capsys, "b", extra=("--trace",))
    assert read_bytes(os.path.join(a, "episodes.csv")) == \
        read_bytes(os.path.join(b, "episodes.csv"))
    assert read_bytes(os.path.join(a, "trace.csv")) == \
        read_bytes(os.path.join(b, "trace.csv"))
    assert read_bytes(os.path.join(a, "checkpoint.npz")) == \
        read_bytes(os.path.join(b, "checkpoint.npz"))
    assert read_manifest(a)["config_sha256"] == read_manifest(b)["config_sha256"]


def test_train_seed_changes_output(tmp_path, capsys):
    a = train_once(tmp_path, capsys, "a")
    c = train_once(tmp_path, capsys, "c", seed="1")
    assert read_bytes(os.path.join(a, "episodes.csv")) != \
        read_bytes(os.path.join(c, "episodes.csv"))


def test_train_figures_toggle(tmp_path, capsys):
    out = str(tmp_path / "fig")
    code, _, _ = run(capsys, "train", "--out", out, *FAST)
    assert code == 0
    assert os.path.exists(os.path.join(out, "training.png"))
    bare = train_once(tmp_path, capsys, "bare")
    assert not os.path.exists(os.path.join(bare, "training.png"))


def test_eval_roundtrip_and_dim_mismatch(tmp_path, capsys):
    out = train_once(tmp_path, capsys)
    ckpt = os.path.join(out, "checkpoint.npz")
    eval_out = str(tmp_path / "eval")
    code, stdout, _ = run(capsys, "eval", "--checkpoint", ckpt,
                          "--out", eval_out, "--steps", "15")
    assert code == 0
    lines = read_bytes(os.path.join(eval_out, "eval.csv")).decode().splitlines()
    assert lines[0] == "steps,avg_rate_bps,avg_jain,satisfaction_fraction"
    assert lines[1].startswith("15,")
    assert read_manifest(eval_out)["command"] == "eval"

    # a 2-user scenario produces 9-dim states; the 17-dim checkpoint must
    # be rejected with both dims in the message
    code, _, err = run(capsys, "eval", "--checkpoint", ckpt,
                       "--out", str(tmp_path / "bad"),
                       "scenario.users=0,0; 10,10")
    assert code == 2
    assert "input dim 17" in err and "dim 9" in err


def test_eval_missing_checkpoint(tmp_path, capsys):
    code, _, err = run(capsys, "eval", "--checkpoint",
                       str(tmp_path / "nope.npz"),
                       "--out", str(tmp_path / "e"))
    assert code == 2
    assert "checkpoint not found" in err


def test_sweep_three_points_three_rows(tmp_path, capsys):
    out = str(tmp_path / "sweep")
    code, stdout, _ = run(capsys, "sweep", "--out", out, "--no-figures",
                          "--ratios", "0,0.5,1", *FAST)
    assert code == 0
    lines = read_bytes(os.path.join(out, "sweep.csv")).decode().splitlines()
    assert lines[0] == "rmin_over_w,r_e_tot_bps,final_satisfaction"
    assert len(lines) == 1 + 3
    assert read_manifest(out)["command"] == "sweep"


def test_sweep_jobs_matches_serial(tmp_path, capsys):
    a = str(tmp_path / "s1")
    b = str(tmp_path / "s3")
    for out, jobs in ((a, "1"), (b, "3")):
        code, _, _ = run(capsys, "sweep", "--out", out, "--no-figures",
                         "--jobs", jobs, "--ratios", "0,1", *FAST)
        assert code == 0
    assert read_bytes(os.path.join(a, "sweep.csv")) == \
        read_bytes(os.path.join(b, "sweep.csv"))


def test_sweep_rejects_bad_ratio_list(tmp_path, capsys):
    code, _, err = run(capsys, "sweep", "--out", str(tmp_path / "s"),
                       "--ratios", "0,abc", *FAST)
    assert code == 2
    assert "--ratios" in err


def test_layouts_roundtrip_and_seed_stability(tmp_path, capsys):
    out = train_once(tmp_path, capsys)
    ckpt = os.path.join(out, "checkpoint.npz")
    a = str(tmp_path / "la")
    b = str(tmp_path / "lb")
    for dest in (a, b):
        code, _, _ = run(capsys, "layouts", "--checkpoint-a", ckpt,
                         "--checkpoint-b", ckpt, "--out", dest,
                         "--n-layouts", "3", "--steps", "5", "--no-figures",
                         "--seed", "4")
        assert code == 0
    assert read_bytes(os.path.join(a, "layouts.csv")) == \
        read_bytes(os.path.join(b, "layouts.csv"))
    lines = read_bytes(os.path.join(a, "layouts.csv")).decode().splitlines()
    assert lines[0] == "layout,rate_a_bps,rate_b_bps,ratio_pct"
    assert len(lines) == 1 + 3
    for line in lines[1:]:
        assert line.endswith(",100.0")  # identical checkpoints tie


def test_oracle_writes_optimum(tmp_path, capsys):
    out = str(tmp_path / "oracle")
    code, stdout, _ = run(capsys, "oracle", "--out", out,
                          "--grid-step", "50", "--h-levels", "10,50",
                          "--alpha-step", "0.25",
                          "scenario.link_mode=always_los")
    assert code == 0
    lines = read_bytes(os.path.join(out, "oracle.csv")).decode().splitlines()
    assert lines[0] == "x,y,h,alpha_0,alpha_1,objective,rate_0,rate_1,rate_2,rate_3"
    assert len(lines) == 2
    assert "objective" in stdout or "optimum" in stdout


def test_baseline_writes_metrics(tmp_path, capsys):
    out = str(tmp_path / "base")
    code, _, _ = run(capsys, "baseline", "--out", out, "--steps", "3",
                     "--position", "0,0,50")
    assert code == 0
    lines = read_bytes(os.path.join(out, "baseline.csv")).decode().splitlines()
    assert lines[0] == "avg_rate_bps,avg_jain,satisfaction_fraction"
    assert len(lines) == 2
    code, _, err = run(capsys, "baseline", "--out", str(tmp_path / "b2"),
                       "--position", "0,0")
    assert code == 2
    assert "x,y,h" in err


def test_unknown_config_key_is_exit_2(tmp_path, capsys):
    code, _, err = run(capsys, "train", "--out", str(tmp_path / "x"),
                       "train.episode=2")
    assert code == 2
    assert "train.episode" in err


def test_out_root_env_used(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("SKYNOMA_OUT", str(tmp_path / "root"))
    code, stdout, _ = run(capsys, "baseline", "--steps", "1")
    assert code == 0
    runs = os.listdir(str(tmp_path / "root"))
    assert len(runs) == 1 and runs[0].startswith("baseline-")


def test_entry_point_runs():
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-m", "skynoma.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    for cmd in ("train", "eval", "sweep", "layouts", "oracle", "baseline"):
        assert cmd in proc.stdout
