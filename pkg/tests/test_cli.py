from __future__ import annotations

import csv
import io
import json
import os
import subprocess
import sys

import pytest

from padic_lab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_process(*argv, env=None):
    full_env = dict(os.environ, **(env or {}))
    return subprocess.run([sys.executable, "-m", "padic_lab", *argv], capture_output=True, env=full_env)


def test_gauss_report(capsys):
    code, out, _ = run(capsys, "gauss", "--p", "3", "--l", "2", "--m", "2", "--a", "5")
    assert code == 0
    row = json.loads(out)
    assert row["pass"] is True and row["s_a"] == 3 and row["v_pi_G"] == 3
    assert row["a"] == 5 and row["N"] >= 1 and "D" in row and "K" in row


def test_gauss_classical_example(capsys):
    code, out, _ = run(capsys, "gauss", "--p", "3", "--l", "1", "--m", "1", "--a", "1")
    assert code == 0 and json.loads(out)["v_pi_G"] == 1


@pytest.mark.parametrize("argv", [
    ["gauss", "--p", "4", "--a", "1"],
    ["gauss", "--p", "3", "--a", "7"],
    ["gauss", "--p", "3"],
    ["audit", "--p", "3", "--bogus"],
    ["audit", "--p", "x"],
    ["sweep", "--p", "3", "--l", "0"],
    ["sweep", "--p", "3", "--format", "xml"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_not_prime_message(capsys):
    code, _, err = run(capsys, "gauss", "--p", "4", "--a", "1")
    assert code == 2 and "p must be prime" in err


def test_too_little_precision_is_a_usage_error(capsys):
    code, _, err = run(capsys, "gauss", "--p", "3", "--l", "2", "--m", "2", "--a", "7", "--prec", "2")
    assert code == 2 and "error" in err
    # AH truncated at X^2 cannot deliver the default precision
    code, _, _ = run(capsys, "gauss", "--p", "2", "--l", "2", "--a", "0", "--ah-trunc", "1")
    assert code == 2
    code, _, _ = run(capsys, "gauss", "--p", "2", "--l", "2", "--a", "0", "--trunc", "2")
    assert code == 2


def test_failed_check_exits_1(capsys, monkeypatch):
    from padic_lab import cli
    from padic_lab.gauss import stickelberger_check

    def failing(sc, a, raise_on_failure=True):
        report = stickelberger_check(sc, a, raise_on_failure)
        report.passed = False
        return report

    monkeypatch.setattr(cli, "stickelberger_check", failing)
    code, out, _ = run(capsys, "gauss", "--p", "3", "--a", "1")
    assert code == 1 and json.loads(out)["pass"] is False


def test_internal_error_exits_3(capsys, monkeypatch):
    from padic_lab import cli
    from padic_lab.errors import CrossCheckMismatch

    def broken(*args, **kwargs):
        raise CrossCheckMismatch("product and trace disagree")

    monkeypatch.setattr(cli, "stickelberger_check", broken)
    code, _, err = run(capsys, "gauss", "--p", "3", "--a", "1")
    assert code == 3 and "internal error" in err


def test_sweep_csv(capsys):
    code, out, err = run(capsys, "sweep", "--p", "2", "--l", "3", "--m", "2", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert len(rows) == 4
    assert rows[0][:4] == ["p", "l", "m", "a"]
    assert all(r[rows[0].index("pass")] == "true" for r in rows[1:])
    assert "3/3 pass" in err


def test_sweep_json_lines(capsys):
    code, out, _ = run(capsys, "sweep", "--p", "5", "--l", "1", "--m", "2")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 24
    assert [json.loads(x)["a"] for x in lines] == list(range(24))
    code, out, _ = run(capsys, "sweep", "--p", "2", "--l", "1", "--m", "1")
    assert code == 0 and len(out.splitlines()) == 1


def test_sweep_text_and_out_file(capsys, tmp_path):
    target = tmp_path / "s.txt"
    code, out, _ = run(capsys, "sweep", "--p", "3", "--l", "1", "--m", "1", "--format", "text", "--out", str(target))
    assert code == 0 and out == ""
    lines = target.read_text().splitlines()
    assert len(lines) == 2 and lines[0].startswith("p=3 l=1 m=1 a=0")


def test_audit(capsys):
    code, out, _ = run(capsys, "audit", "--p", "2", "--l", "2", "--m", "2")
    row = json.loads(out)
    assert code == 0 and row["pass"] is True and row["pairs_checked"] == 256
    code, out, _ = run(capsys, "audit", "--p", "3", "--l", "2", "--m", "1")
    row = json.loads(out)
    assert code == 0 and row["pairs_checked"] == 81 and row["exhaustive"] is True
    assert list(row)[:6] == ["p", "l", "m", "pairs_checked", "min_depth_observed", "pass"]


def test_polys(capsys):
    code, out, _ = run(capsys, "polys", "--p", "2", "--l", "3", "--format", "text")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "P_0 = X_0 + Y_0"
    assert [x.split(" =")[0] for x in lines] == ["P_0", "P_1", "P_2", "S_0", "S_1", "S_2"]
    code, out, _ = run(capsys, "polys", "--p", "2", "--l", "2")
    assert json.loads(out.splitlines()[1])["kind"] == "P"


def test_series(capsys):
    code, out, _ = run(capsys, "series", "--p", "3", "--degree", "10")
    obj = json.loads(out)
    assert code == 0
    assert obj["e_n"][:4] == ["1", "1", "1/2", "1/2"]
    assert len(obj["residues"]) == 11
    assert obj["ah_newton_polygon"] == [{"slope": "-1/2", "length": 2}, {"slope": "-1/6", "length": 6}]


def test_digit_lemma(capsys):
    code, out, _ = run(capsys, "digit-lemma", "--p", "3", "--m", "2", "--bound", "6")
    row = json.loads(out)
    assert code == 0 and row["pass"] is True and row["tuples_checked"] == 49


def test_sweeps_are_byte_identical():
    args = ["sweep", "--p", "3", "--l", "2", "--m", "2"]
    first, second = run_process(*args), run_process(*args)
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout and first.stdout
    threaded = run_process(*args, env={"PADIC_LAB_THREADS": "2"})
    assert threaded.returncode == 0 and threaded.stdout == first.stdout


def test_bad_thread_setting():
    res = run_process("sweep", "--p", "2", env={"PADIC_LAB_THREADS": "many"})
    assert res.returncode == 2
