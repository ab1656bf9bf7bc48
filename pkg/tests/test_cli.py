import json

import numpy as np
import pytest

from redpoctor.cli import main
from redpoctor.io import parse_stream_csv, read_sweep_dat


@pytest.fixture
def stream_csv(tmp_path):
    path = tmp_path / "s.csv"
    assert main(["gen", "--profile", "mixed", "--days", "20", "--bins", "12", "--seed", "4", "-o", str(path)]) == 0
    return path


def test_gen_writes_requested_shape(stream_csv):
    s = parse_stream_csv(stream_csv)
    assert len(s) == 20 and s.as_array().shape == (20, 12)


def test_run_outputs(stream_csv, tmp_path):
    out = tmp_path / "out"
    assert main(["run", "-i", str(stream_csv), "-o", str(out), "--set", "w=7", "--seed", "5"]) == 0
    m = json.loads((out / "metrics.json").read_text())
    assert m["days"] == 20 and m["seed"] == 5 and m["config"]["w"] == 7
    assert len(parse_stream_csv(out / "released.csv", allow_negative=True)) == 20


def test_run_is_byte_identical(stream_csv, tmp_path):
    for name in ("a", "b"):
        assert main(["run", "-i", str(stream_csv), "-o", str(tmp_path / name), "--seed", "2"]) == 0
    for f in ("released.csv", "metrics.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_seed_precedence(stream_csv, tmp_path, monkeypatch):
    cfg = tmp_path / "c.txt"
    cfg.write_text("seed = 11\n")
    monkeypatch.setenv("REDPOCTOR_SEED", "8")

    def seed_of(*extra):
        out = tmp_path / "o"
        assert main(["run", "-i", str(stream_csv), "-o", str(out), *extra]) == 0
        return json.loads((out / "metrics.json").read_text())["seed"]

    assert seed_of() == 8
    assert seed_of("-c", str(cfg)) == 11
    assert seed_of("-c", str(cfg), "--set", "seed=12") == 12
    assert seed_of("-c", str(cfg), "--set", "seed=12", "--seed", "13") == 13


def test_env_seed_must_be_integer(stream_csv, tmp_path, monkeypatch):
    monkeypatch.setenv("REDPOCTOR_SEED", "abc")
    assert main(["run", "-i", str(stream_csv), "-o", str(tmp_path / "o")]) == 1


def test_compare(stream_csv, tmp_path):
    out = tmp_path / "cmp"
    assert main(["compare", "-i", str(stream_csv), "-o", str(out), "--baselines", "uniform"]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert set(summary["methods"]) == {"redpoctor", "uniform"}
    assert (out / "uniform" / "metrics.json").exists()


def test_sweep_epsilon(stream_csv, tmp_path):
    out = tmp_path / "sw"
    args = ["sweep", "-i", str(stream_csv), "-o", str(out), "--axis", "epsilon=0.1,0.5,1,3", "--seeds", "2"]
    assert main(args + ["--baselines", "uniform"]) == 0
    rows = read_sweep_dat(out / "sweep.dat")
    assert rows.shape == (4, 3)
    np.testing.assert_array_equal(rows[:, 0], [0.1, 0.5, 1, 3])
    assert read_sweep_dat(out / "sweep_uniform.dat").shape == (4, 3)
    m = json.loads((out / "epsilon_total=0.5" / "metrics.json").read_text())
    assert m["seeds"] == [0, 1] and m["config"]["epsilon_total"] == 0.5


def test_sweep_jobs_match_serial(stream_csv, tmp_path):
    base = ["sweep", "-i", str(stream_csv), "--axis", "w=7,14"]
    assert main(base + ["-o", str(tmp_path / "a")]) == 0
    assert main(base + ["-o", str(tmp_path / "b"), "--jobs", "2"]) == 0
    assert (tmp_path / "a" / "sweep.dat").read_bytes() == (tmp_path / "b" / "sweep.dat").read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["nosuch"],
        ["run", "-o", "x"],
        ["gen", "--days", "0", "-o", "x.csv"],
        ["compare", "-i", "{s}", "-o", "{o}", "--baselines", "bogus"],
        ["run", "-i", "{s}", "-o", "{o}", "--set", "nosuch=1"],
        ["sweep", "-i", "{s}", "-o", "{o}", "--axis", "epsilon"],
        ["sweep", "-i", "{s}", "-o", "{o}", "--axis", "epsilon=1", "--seeds", "0"],
    ],
)
def test_usage_errors_exit_1(argv, stream_csv, tmp_path, capsys):
    argv = [a.format(s=stream_csv, o=tmp_path / "o") for a in argv]
    assert main(argv) == 1
    assert "usage error" in capsys.readouterr().err


def test_bad_data_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("day,bin_index,value\n1,0,1\n1,1,oops\n")
    assert main(["run", "-i", str(bad), "-o", str(tmp_path / "o")]) == 2
    assert "line 3" in capsys.readouterr().err
    assert main(["run", "-i", str(tmp_path / "missing.csv"), "-o", str(tmp_path / "o")]) == 2


def test_empty_stream_run(tmp_path):
    empty = tmp_path / "e.csv"
    empty.write_text("day,bin_index,value\n")
    out = tmp_path / "o"
    assert main(["run", "-i", str(empty), "-o", str(out)]) == 0
    assert json.loads((out / "metrics.json").read_text())["days"] == 0
    assert (out / "released.csv").read_text() == "day,bin_index,value\n"
