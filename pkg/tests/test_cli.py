"""Command line client: modes, formats, exit codes."""

import json
import socket
import subprocess
import sys
import time

import pytest

import ptslcp.cli as cli
from ptslcp.bench import CSV_HEADER
from ptslcp.problem import GeneratorConfig, generate_random, write_problem


BATCH_ARGS = ["--sizes", "2,3", "--instances", "1"]


def test_batch_table_mode(capsys):
    code = cli.main(BATCH_ARGS)
    out = capsys.readouterr().out
    assert code == 0
    assert "mean_pred" in out
    assert " ac " in out or " ac" in out
    assert "failed:" not in out


def test_batch_csv_mode(capsys):
    code = cli.main(BATCH_ARGS + ["--format", "csv"])
    out = capsys.readouterr().out.strip().splitlines()
    assert code == 0
    assert out[0] == CSV_HEADER
    assert len(out) == 1 + 2  # two sizes x one instance x one direction
    fields = out[1].split(",")
    assert fields[2] == "ac"
    assert fields[7] == "converged"


def test_batch_json_mode(capsys):
    code = cli.main(BATCH_ARGS + ["--format", "json"])
    body = json.loads(capsys.readouterr().out)
    assert code == 0
    assert body["all_converged"] is True
    assert len(body["rows"]) == 2


def test_batch_both_directions(capsys):
    code = cli.main(BATCH_ARGS + ["--direction", "both", "--format", "csv"])
    out = capsys.readouterr().out.strip().splitlines()
    assert code == 0
    directions = {line.split(",")[2] for line in out[1:]}
    assert directions == {"ac", "ut"}


def test_batch_theory_tau(capsys):
    code = cli.main(["--n", "4", "--instances", "1", "--tau", "theory"])
    assert code == 0
    capsys.readouterr()


def test_batch_failure_exit_code(monkeypatch, capsys):
    body = {"all_converged": False, "summaries": [],
            "rows": [{"n": 4, "seed": 0, "direction": "ac", "predictors": 1,
                      "correctors": 2, "final_xts": None, "final_v0": None,
                      "status": "budget_exceeded", "wall_ms": 1.0}]}
    monkeypatch.setattr(cli.ServiceClient, "post",
                        lambda self, path, payload: body)
    code = cli.main(["--n", "4"])
    out = capsys.readouterr().out
    assert code == 1
    assert "failed: n=4 seed=0" in out


def test_batch_failure_csv_uses_nan(monkeypatch, capsys):
    body = {"all_converged": False, "summaries": [],
            "rows": [{"n": 4, "seed": 0, "direction": "ac", "predictors": 1,
                      "correctors": 2, "final_xts": None, "final_v0": None,
                      "status": "numerical_failure", "wall_ms": 1.0}]}
    monkeypatch.setattr(cli.ServiceClient, "post",
                        lambda self, path, payload: body)
    code = cli.main(["--n", "4", "--format", "csv"])
    out = capsys.readouterr().out.strip().splitlines()
    assert code == 1
    assert out[1].split(",")[5] == "nan"


def test_bad_tau_is_a_usage_error():
    with pytest.raises(SystemExit) as info:
        cli.main(["--tau", "wide"])
    assert info.value.code == 2


def test_trace_mode_csv(capsys):
    code = cli.main(["--trace", "--n", "6", "--format", "csv"])
    out = capsys.readouterr().out.strip().splitlines()
    assert code == 0
    assert out[0] == "exponent,predictors,correctors"
    assert all(len(line.split(",")) == 3 for line in out[1:])


def test_trace_mode_table(capsys):
    code = cli.main(["--trace", "--n", "6", "--eps", "1e-8"])
    out = capsys.readouterr().out
    assert code == 0
    assert "initial x^T s" in out
    assert "accuracy" in out
    assert "converged" in out
    assert "partition |B|=" in out


def test_trace_conflicts_with_problem(capsys, tmp_path):
    code = cli.main(["--trace", "--problem", str(tmp_path / "p.json")])
    err = capsys.readouterr().err
    assert code == 2
    assert "cannot be combined" in err


def write_instance(tmp_path, with_start=True):
    problem, pair = generate_random(GeneratorConfig(n=4, seed=0))
    path = tmp_path / "instance.json"
    write_problem(problem, path, start=pair if with_start else None)
    return path


def test_problem_file_solve(capsys, tmp_path):
    path = write_instance(tmp_path)
    code = cli.main(["--problem", str(path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "status: converged" in out
    assert "x = " in out


def test_problem_file_solve_csv(capsys, tmp_path):
    path = write_instance(tmp_path)
    code = cli.main(["--problem", str(path), "--format", "csv"])
    out = capsys.readouterr().out.strip().splitlines()
    assert code == 0
    assert out[0] == CSV_HEADER
    fields = out[1].split(",")
    assert fields[0] == "4"
    assert fields[1] == "-1"  # placeholder seed for file instances
    assert fields[2] == "-"
    assert fields[7] == "converged"


def test_problem_file_requires_start(capsys, tmp_path):
    path = write_instance(tmp_path, with_start=False)
    code = cli.main(["--problem", str(path)])
    err = capsys.readouterr().err
    assert code == 2
    assert "no x0/s0" in err


def test_problem_file_missing(capsys, tmp_path):
    code = cli.main(["--problem", str(tmp_path / "absent.json")])
    err = capsys.readouterr().err
    assert code == 2
    assert "cannot read" in err


def test_problem_file_malformed(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"n": 2,\n "M": [}\n')
    code = cli.main(["--problem", str(path)])
    err = capsys.readouterr().err
    assert code == 2
    assert "bad problem file (line 2" in err


def test_problem_file_rejects_both_directions(capsys, tmp_path):
    path = write_instance(tmp_path)
    code = cli.main(["--problem", str(path), "--direction", "both"])
    err = capsys.readouterr().err
    assert code == 2
    assert "single direction" in err


def _free_port():
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def test_remote_server_round_trip(capsys):
    try:
        port = _free_port()
    except OSError:
        pytest.skip("socket binding is not permitted in this environment")
    proc = subprocess.Popen(
        [sys.executable, "-m", "ptslcp.cli", "--serve", "--port", str(port)],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    try:
        import httpx

        url = f"http://127.0.0.1:{port}"
        deadline = time.time() + 30.0
        while True:
            try:
                if httpx.get(url + "/health", timeout=1.0).status_code == 200:
                    break
            except Exception:
                if proc.poll() is not None:
                    pytest.skip("server process could not start here")
                if time.time() > deadline:
                    pytest.skip("server did not come up within 30s")
                time.sleep(0.2)
        code = cli.main(["--server", url, "--n", "3", "--instances", "1",
                         "--format", "csv"])
        remote = capsys.readouterr().out
        assert code == 0
        code = cli.main(["--n", "3", "--instances", "1", "--format", "csv"])
        local = capsys.readouterr().out

        def strip_wall(text):
            return [line.rsplit(",", 1)[0]
                    for line in text.strip().splitlines()]

        assert strip_wall(remote) == strip_wall(local)
    finally:
        proc.terminate()
        proc.wait(timeout=10)
