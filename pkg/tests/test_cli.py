import csv
import subprocess
import sys

import pytest

from conftest import DATA, tt
from fairtt.cli import EXIT_INVALID, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, main
from fairtt.instance_io import serialize_solution
from fairtt.neighborhood import build_initial

TOY = str(DATA / "toy.ctt")


@pytest.fixture
def toy_solution(tmp_path, toy):
    path = tmp_path / "toy.sol"
    path.write_text(serialize_solution(build_initial(toy, 0)))
    return str(path)


@pytest.fixture
def bad_solution(tmp_path):
    path = tmp_path / "bad.sol"
    path.write_text(serialize_solution(tt(c1=[(0, 0, "rA")], c2=[(0, 0, "rB"), (1, 0, "rA")], c3=[(1, 1, "rA")], c4=[(0, 1, "rA")])))
    return str(path)


def test_validate_instance(capsys):
    assert main(["validate", TOY]) == EXIT_OK
    assert "4 courses" in capsys.readouterr().out


def test_validate_solution(toy_solution, bad_solution, capsys):
    assert main(["validate", TOY, toy_solution]) == EXIT_OK
    assert capsys.readouterr().out.strip().endswith("feasible")
    assert main(["validate", TOY, bad_solution]) == EXIT_INVALID
    assert "H3" in capsys.readouterr().out


def test_validate_malformed(tmp_path, capsys):
    bad = tmp_path / "x.ctt"
    bad.write_text("Name: x\nCourses: two\n")
    assert main(["validate", str(bad)]) == EXIT_INVALID
    assert "Malformed" in capsys.readouterr().err


def test_evaluate(toy_solution, capsys):
    assert main(["evaluate", TOY, toy_solution]) == EXIT_OK
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert rows == [
        {"instance": "toy", "curricula": "2", "total_penalty": "29", "jain_shifted": "0.5000", "allocation": "27,12"}
    ]


def test_evaluate_infeasible(bad_solution, capsys):
    assert main(["evaluate", TOY, bad_solution]) == EXIT_INVALID
    assert "Infeasible" in capsys.readouterr().err


def test_solve_mmf(tmp_path, capsys):
    out, trace = tmp_path / "best.sol", tmp_path / "trace.csv"
    assert main(["solve-mmf", TOY, "--timeout-s", "0.5", "--seed", "1", "--out", str(out), "--trace", str(trace)]) == EXIT_OK
    assert out.exists()
    assert trace.read_text().startswith("elapsed_s,best_alloc,total_penalty")
    assert main(["validate", TOY, str(out)]) == EXIT_OK


def test_solve_mmf_from_start(toy_solution, bad_solution, capsys):
    assert main(["solve-mmf", TOY, "--timeout-s", "0.2", "--start", toy_solution]) == EXIT_OK
    assert main(["solve-mmf", TOY, "--timeout-s", "0.2", "--start", bad_solution]) == EXIT_INVALID


def test_solve_jfi_and_pareto(tmp_path, toy_solution, capsys):
    out = tmp_path / "arch"
    assert main(["solve-jfi", TOY, "--timeout-s", "0.5", "--out-dir", str(out)]) == EXIT_OK
    text = capsys.readouterr().out
    assert "jain_index,penalty,below_tradeoff_line" in text
    assert (out / "pareto.csv").exists() and (out / "pareto_report.csv").exists()

    assert main(["pareto", str(out / "pareto.csv"), "--seed-penalty", "29", "--seed-jain", "0.5"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("jain_index,penalty,below_tradeoff_line")
    assert main(["pareto", str(out / "pareto.csv"), "--instance", TOY, "--seed-solution", toy_solution]) == EXIT_OK
    assert main(["pareto", str(out / "pareto.csv")]) == EXIT_USAGE
    assert main(["pareto", str(out / "pareto.csv"), "--seed-solution", toy_solution]) == EXIT_USAGE


def test_batch_and_compare(tmp_path, capsys, bad_solution):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["batch", TOY, "--runs", "3", "--timeout-s", "0.2", "--out", str(a)]) == EXIT_OK
    rows = list(csv.DictReader(a.read_text().splitlines()))
    assert [r["seed"] for r in rows] == ["0", "1", "2"]
    worse = [dict(r, worst_penalty="40") for r in rows]
    with b.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(worse)
    capsys.readouterr()
    assert main(["compare", str(a), str(b)]) == EXIT_OK
    header, line = capsys.readouterr().out.splitlines()
    assert header == "statistic,p_value,direction,exact,verdict"
    assert line.split(",")[2] == "A_better"
    assert main(["batch", TOY, "--runs", "2", "--timeout-s", "0.1", "--start", bad_solution]) == EXIT_INVALID


def test_batch_all_runs_failed(tmp_path, monkeypatch, capsys):
    import fairtt.cli as cli
    from fairtt.harness import BatchResult, RunRecord
    from fairtt.mmf_solver import SAParams

    monkeypatch.setattr(cli, "run_batch", lambda *a, **k: BatchResult("toy", "mmf", SAParams(), [RunRecord(0, None, None, 0.0, "boom")]))
    assert main(["batch", TOY, "--runs", "1", "--timeout-s", "0.1"]) == EXIT_RUNTIME


def test_compare_runtime_errors(tmp_path, capsys):
    a = tmp_path / "a.csv"
    a.write_text("instance,mode,seed,total_penalty,worst_penalty,allocation,wall_s,error\ntoy,mmf,0,1,1,1,0.1,\n")
    assert main(["compare", str(a), str(a), "--column", "missing"]) == EXIT_RUNTIME
    assert main(["compare", str(a), str(tmp_path / "none.csv")]) == EXIT_RUNTIME
    assert main(["compare", str(a), str(a)]) == EXIT_RUNTIME  # degenerate sample


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["solve-mmf", TOY, "--energy", "gini"])
    assert exc.value.code == EXIT_USAGE


def test_console_script_help():
    out = subprocess.run([sys.executable, "-m", "fairtt.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for cmd in ("validate", "evaluate", "solve-mmf", "solve-jfi", "batch", "compare", "pareto"):
        assert cmd in out.stdout
