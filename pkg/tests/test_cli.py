from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from humanoid_wbc import cli


def run(argv, capsys=None):
    try:
        code = cli.main([str(a) for a in argv])
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    out = capsys.readouterr() if capsys else None
    return code, out


def test_clock_csv(tmp_path):
    out = tmp_path / "c.csv"
    assert run(["clock", "--gait", "walking", "--f", "2.0", "--cycles", "2", "--out", out])[0] == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert list(rows[0]) == ["t", "phi1", "phi2", "phibar1", "phibar2", "clockL", "clockR", "C1", "C2"]
    assert len(rows) == 51


def test_clock_to_stdout(capsys):
    code, out = run(["clock", "--gait", "jumping", "--cycles", "0.1"], capsys)
    assert code == 0 and out.out.startswith("t,phi1")


def test_traj_csv_and_svg(tmp_path):
    out, svg = tmp_path / "t.csv", tmp_path / "t.svg"
    assert run(["traj", "--l", "0.2", "--n", "5", "--out", out, "--svg", svg])[0] == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "phibar,height,velocity,acceleration"
    assert lines[4].startswith("0.75,0.2")
    assert svg.read_text().startswith("<svg")


def test_sample_commands_with_config(tmp_path):
    ini = tmp_path / "c.ini"
    ini.write_text("[ranges]\nvx.initial = -0.1, 0.2\n[sample-commands]\nn = 20\nseed = 4\n")
    out = tmp_path / "cmds.jsonl"
    assert run(["sample-commands", "--config", ini, "--out", out])[0] == 0
    cmds = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(cmds) == 20
    assert all(-0.1 <= c["vx"] <= 0.2 for c in cmds)


def test_explicit_flag_beats_config(tmp_path):
    ini = tmp_path / "c.ini"
    ini.write_text("[sample-commands]\nn = 20\n")
    out = tmp_path / "cmds.jsonl"
    assert run(["sample-commands", "--config", ini, "--n", "3", "--out", out])[0] == 0
    assert len(out.read_text().splitlines()) == 3


def test_rollout_metrics_reward_export(tmp_path, capsys):
    log = tmp_path / "log.jsonl"
    assert run(["rollout", "--vx", "1.0", "--h", "-0.1", "--steps", "200", "--out", log])[0] == 0
    rep = tmp_path / "r.json"
    assert run(["metrics", "--log", log, "--out", rep])[0] == 0
    report = json.loads(rep.read_text())
    assert report["E_cmd"]["h"] < 1e-6 and report["n_steps"] == 200
    bd = tmp_path / "b.csv"
    code, out = run(["reward", "--log", log, "--out", bd], capsys)
    assert code == 0 and "termination" in out.out and bd.exists()
    assert run(["export", "--log", log, "--out-dir", tmp_path / "curves", "--svg"])[0] == 0
    assert (tmp_path / "curves" / "clocks.svg").exists()


def test_intervene_histogram(tmp_path, capsys):
    out = tmp_path / "h.csv"
    code, o = run(["intervene", "--steps", "200000", "--p", "0.005", "--seed", "3", "--out", out], capsys)
    assert code == 0 and "mean=" in o.err
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    total = sum(int(r["count"]) * int(r["run_length"]) for r in rows)
    assert 0 < total <= 200000


def test_intervene_dataset(tmp_path):
    data = tmp_path / "d.jsonl"
    data.write_text("".join(json.dumps({"t": i / 30, "joints": [float(i)] * 8}) + "\n" for i in range(31)))
    out = tmp_path / "o.csv"
    assert run(["intervene", "--dataset", data, "--out", out])[0] == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 51 and list(rows[0])[1:] == [f"j{i}" for i in range(8)]
    assert float(rows[1]["j0"]) == pytest.approx(0.6)


def test_train_toy(tmp_path, capsys):
    out = tmp_path / "toy.json"
    code, o = run(["train-toy", "--epochs", "2", "--seed", "1", "--out", out, "--verbose"], capsys)
    assert code == 0
    assert len(o.out.splitlines()) == 3
    assert len(json.loads(out.read_text())["epochs"]) == 2


@pytest.mark.parametrize("argv", [
    ["rollout", "--gait", "galloping"],
    ["rollout", "--steps", "-3"],
    ["clock", "--sigma", "0.5"],
    ["metrics", "--log", "/nonexistent/log.jsonl"],
    ["traj", "--l", "-1"],
    ["nonsense"],
])
def test_config_errors_exit_2(argv, capsys):
    assert run(argv)[0] == 2


def test_bad_config_file_exit_2(tmp_path, capsys):
    ini = tmp_path / "c.ini"
    ini.write_text("[rollout]\nbogus = 1\n")
    assert run(["rollout", "--config", ini])[0] == 2
    ini.write_text("[rollout]\nsteps = many\n")
    assert run(["rollout", "--config", ini])[0] == 2
    assert run(["rollout", "--config", tmp_path / "missing.ini"])[0] == 2
    ini.write_text("not an ini file")
    assert run(["rollout", "--config", ini])[0] == 2


def test_empty_log_exit_2(tmp_path):
    empty = tmp_path / "e.jsonl"
    empty.write_text("")
    assert run(["export", "--log", empty, "--out-dir", tmp_path / "x"])[0] == 2
    assert not (tmp_path / "x").exists()


def test_numeric_failure_exit_3(capsys):
    assert run(["train-toy", "--epochs", "1", "--lr", "nan"])[0] == 3


def test_subprocess_byte_identical(tmp_path):
    outs = []
    for tag in "ab":
        path = tmp_path / f"{tag}.jsonl"
        subprocess.run([sys.executable, "-m", "humanoid_wbc.cli", "rollout", "--vx", "0.7", "--steps", "120",
                        "--p-flip", "0.05", "--seed", "9", "--out", str(path)], check=True)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
