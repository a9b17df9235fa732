import json
import subprocess
import sys

import pytest

from hecke_sep import cli, suites
from hecke_sep.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main, strip_timing


def run_cli(tmp_path, *args, name="out.jsonl"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    records = [json.loads(line) for line in out.read_text().splitlines()] if out.exists() else []
    return code, records


def write_cfg(tmp_path, text, name="cfg.json"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


SMALL_EPS = '{"ring": [2, 1, 1], "k": 1, "a_valuation": 1, "N_list": [1], "M_max": 1}'


def test_epsilon_record_fields(tmp_path):
    code, recs = run_cli(tmp_path, "epsilon", "--config", write_cfg(tmp_path, SMALL_EPS), "--seed", "7")
    assert code == EXIT_OK and len(recs) == 2
    for rec in recs:
        assert rec["pass"] is True and rec["outcome"] == "pass"
        assert rec["seed"] == 7 and rec["schema_version"] == cli.SCHEMA_VERSION
        for key in ("command", "suite", "params", "counterexample", "runtime_ms", "epsilon_hat"):
            assert key in rec


def test_runs_are_reproducible(tmp_path):
    cfg = write_cfg(tmp_path, '{"q_values": [2, 3], "d_max": 1, "samples": 20}')
    _, a = run_cli(tmp_path, "reduce", "--config", cfg, "--seed", "11", name="a.jsonl")
    _, b = run_cli(tmp_path, "reduce", "--config", cfg, "--seed", "11", name="b.jsonl")
    assert a and [strip_timing(r) for r in a] == [strip_timing(r) for r in b]
    assert all(r["seed"] == 11 for r in a)


def test_matrices_suite_one_record_per_case(tmp_path):
    cfg = write_cfg(tmp_path, '{"m_max": 3, "a_range": 1, "kind3_primes": [2]}')
    code, recs = run_cli(tmp_path, "lemmas", "--suite", "matrices", "--config", cfg)
    assert code == EXIT_OK
    assert {r["suite"] for r in recs} == {"matrix"}
    keys = [json.dumps(r["params"], sort_keys=True) for r in recs]
    assert len(keys) == len(set(keys))
    # kind 1 for m = 1..3, kind 2 for t = 2..m, each over a = -1..1
    assert sum(r["params"]["kind"] in (1, 2) for r in recs) == 3 * (3 + 1 + 2)


def test_failing_job_exits_one(tmp_path, monkeypatch):
    monkeypatch.setitem(suites.JOBS, "classify", lambda params, seed: suites.JobResult(False, {"why": "forced"}))
    monkeypatch.setattr(cli, "JOBS", suites.JOBS)
    code, recs = run_cli(tmp_path, "classify", "--config", write_cfg(tmp_path, '{"k_max": 1, "v_max": 0}'))
    assert code == EXIT_FAIL
    assert recs and all(r["outcome"] == "fail" and r["counterexample"] == {"why": "forced"} for r in recs)


@pytest.mark.parametrize(
    "text",
    [
        '{"k": 3, "colour": 1}',
        '{"k": "three"}',
        '{"ring": [4, 1, 1]}',
        '{"seed": -1}',
    ],
)
def test_bad_config_exits_two(tmp_path, capsys, text):
    assert main(["epsilon", "--config", write_cfg(tmp_path, text)]) == EXIT_USAGE
    assert "config error" in capsys.readouterr().err


def test_malformed_json_reports_line(tmp_path, capsys):
    cfg = write_cfg(tmp_path, '{\n  "k": 3,\n  "M_max": \n}\n')
    assert main(["epsilon", "--config", cfg]) == EXIT_USAGE
    assert "line 4" in capsys.readouterr().err


def test_unknown_command_and_missing_file(tmp_path):
    assert main(["frobnicate"]) == EXIT_USAGE
    assert main(["epsilon", "--config", str(tmp_path / "nope.json")]) == EXIT_USAGE
    assert main(["replay", "--record", str(tmp_path / "nope.jsonl")]) == EXIT_USAGE


def test_replay_reproduces_and_detects_tampering(tmp_path):
    code, recs = run_cli(tmp_path, "epsilon", "--config", write_cfg(tmp_path, SMALL_EPS), name="rep.jsonl")
    assert code == EXIT_OK
    code, again = run_cli(tmp_path, "replay", "--record", str(tmp_path / "rep.jsonl"), name="again.jsonl")
    assert code == EXIT_OK and all(r["reproduced"] for r in again)

    recs[0]["epsilon_hat"] = 99
    (tmp_path / "bad.jsonl").write_text("".join(json.dumps(r) + "\n" for r in recs))
    code, again = run_cli(tmp_path, "replay", "--record", str(tmp_path / "bad.jsonl"), name="again2.jsonl")
    assert code == EXIT_FAIL
    assert [r["reproduced"] for r in again] == [False, True]

    code, only = run_cli(tmp_path, "replay", "--record", str(tmp_path / "rep.jsonl"), "--failures-only", name="f.jsonl")
    assert code == EXIT_OK and only == []


def test_console_entry_point(tmp_path):
    cfg = write_cfg(tmp_path, '{"k_max": 2, "v_max": 1}')
    proc = subprocess.run(
        [sys.executable, "-m", "hecke_sep", "classify", "--config", cfg, "--seed", "3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    recs = [json.loads(line) for line in proc.stdout.splitlines()]
    assert len(recs) == 3 * 2 and all(r["seed"] == 3 for r in recs)
