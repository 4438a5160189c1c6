# Any copyright is dedicated to the public domain.
# http://creativecommons.org/publicdomain/zero/1.0/

import csv
from io import StringIO

import pytest

import fplstat.main
from fplstat.main import main as fplstat_main


@pytest.fixture
def run_fplstat():
    def inner(args):
        try:
            return fplstat_main(args)
        except SystemExit as e:
            return e.code

    return inner


def test_no_arguments(run_fplstat, capsys):
    assert run_fplstat([]) == 1
    out, _ = capsys.readouterr()
    assert "usage:" in out


def test_commands_registered():
    assert set(fplstat.main.commands) == {
        "compute",
        "diagnose",
        "oracle",
        "mc",
        "experiment",
        "generate",
    }


def test_generate(run_fplstat, capsys):
    assert run_fplstat(["generate", "--gen", "equispaced", "--size", "4"]) == 0
    out, _ = capsys.readouterr()
    assert out == "0.0\n0.25\n0.5\n0.75\n"


def test_generate_to_file(run_fplstat, tmp_path):
    path = tmp_path / "pop.txt"
    assert run_fplstat(["generate", "--gen", "two-point:0,1,0.5", "-N", "4", "-o", str(path)]) == 0
    assert path.read_text() == "0.0\n0.0\n1.0\n1.0\n"


def test_compute(run_fplstat, capsys, write_lines):
    sample = write_lines("sample.txt", ["3", "1", "2"])
    assert run_fplstat(["compute", "--sample", str(sample)]) == 0
    out, _ = capsys.readouterr()
    assert out == "L = 2.0\n"

    assert (
        run_fplstat(
            ["compute", "--sample", str(sample), "--gen", "uniform-quantile", "--size", "5"]
        )
        == 0
    )
    out, _ = capsys.readouterr()
    lines = out.splitlines()
    assert lines[0] == "L = 2.0"
    assert lines[1].startswith("E L = ")
    assert lines[2].startswith("S = ")


def test_oracle(run_fplstat, capsys, tmp_path):
    out_path = tmp_path / "atoms.csv"
    args = [
        "oracle",
        "--gen",
        "equispaced",
        "--size",
        "6",
        "--n",
        "2",
        "--weights",
        "trimmed:0.1,0.9",
        "--out",
        str(out_path),
    ]
    assert run_fplstat(args) == 0
    with open(out_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    # the minimum of a 2-sample takes 5 distinct values
    assert len(rows) == 5
    _, err = capsys.readouterr()
    assert "delta2 = " in err
    assert "var_s = " in err


def test_diagnose(run_fplstat, capsys):
    args = ["diagnose", "--gen", "normal-quantile", "-N", "10", "--n", "4", "--weights", "gini"]
    assert run_fplstat(args + ["--epsilons", "0.1", "--deltas", "1"]) == 0
    out, err = capsys.readouterr()
    rows = list(csv.DictReader(StringIO(out)))
    assert {r["quantity"] for r in rows if r["grid"] == "epsilon"} == {
        "er_classical",
        "er_g1",
        "lindeberg_g1",
    }
    assert any(r["quantity"] == "c_min" for r in rows)
    assert "n_* = 4" in err
    assert "er_g1_max = " in err


def test_mc(run_fplstat, capsys, tmp_path):
    dump = tmp_path / "reps.csv"
    args = [
        "mc",
        "--gen",
        "equispaced",
        "-N",
        "8",
        "--n",
        "3",
        "--weights",
        "gini",
        "--reps",
        "200",
        "-j",
        "1",
        "--dump-replicates",
        str(dump),
    ]
    assert run_fplstat(args) == 0
    out, _ = capsys.readouterr()
    assert "ks = " in out
    assert "delta2 = " in out
    with open(dump, newline="") as fh:
        assert len(list(csv.DictReader(fh))) == 200


def test_experiment(run_fplstat, tmp_path):
    plan = tmp_path / "plan.txt"
    plan.write_text("family = 8:3\nreps = 100\nweights = gini\n")
    out, log = tmp_path / "study.csv", tmp_path / "logs" / "run.log"
    args = ["experiment", "-p", str(plan), "-o", str(out), "--log-file", str(log), "-j", "1"]
    assert run_fplstat(args) == 0
    assert log.exists()
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert rows[0]["status"] == "ok"


@pytest.mark.parametrize(
    "args,code",
    (
        pytest.param(["oracle", "--n", "2"], 2, id="no population"),
        pytest.param(["oracle", "--gen", "equispaced", "--n", "2"], 2, id="no size"),
        pytest.param(["oracle", "--gen", "equispaced", "-N", "6"], 2, id="no sample size"),
        pytest.param(
            ["oracle", "--gen", "equispaced", "-N", "40", "--n", "20"], 3, id="guard"
        ),
        pytest.param(
            ["oracle", "--gen", "equispaced", "-N", "100", "--n", "50"], 3, id="wide guard"
        ),
        pytest.param(
            ["mc", "--gen", "equispaced", "-N", "6", "--n", "2", "--seed", "-1"],
            2,
            id="negative seed",
        ),
        pytest.param(
            ["oracle", "--gen", "equispaced", "-N", "6", "--n", "2", "--weights", "bad"],
            4,
            id="bad weights",
        ),
        pytest.param(
            ["diagnose", "--gen", "equispaced", "-N", "6", "--n", "2", "--deltas", "x"],
            2,
            id="bad grid",
        ),
        pytest.param(["experiment", "--reps", "5"], 2, id="bad plan"),
    ),
)
def test_exit_codes(run_fplstat, capsys, args, code):
    assert run_fplstat(args) == code
