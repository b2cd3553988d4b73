import csv
import io
import json
import math
import subprocess
import sys

import pytest

from cosmin import cli
from cosmin.cli import EXIT_CHECKPOINT, EXIT_OK, EXIT_TOL, EXIT_USAGE, EXIT_VERIFY, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_min_cosine_text(capsys):
    code, out, _ = run(capsys, "min", "--cosine", "1,2")
    assert code == EXIT_OK
    assert "-1.125000" in out


def test_min_newman_json(capsys):
    code, out, _ = run(capsys, "min", "--newman", "0,1,3", "--output", "json")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["kind"] == "newman"
    assert doc["value"] == pytest.approx(0.607346, abs=1e-6)
    assert {"theta", "value", "error_radius", "grid_size", "refined"} <= set(doc)


def test_min_single_cosine(capsys):
    code, out, _ = run(capsys, "min", "--cosine", "7", "--output", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK
    assert float(rows[0]["value"]) == pytest.approx(-1.0, abs=1e-12)
    assert float(rows[0]["theta"]) == pytest.approx(math.pi / 7, abs=1e-7)


def test_exponent_list_whitespace_and_order(capsys):
    code, out, _ = run(capsys, "min", "--cosine", " 2, 1 ", "--output", "json")
    assert code == EXIT_OK and json.loads(out)["set"] == [1, 2]


@pytest.mark.parametrize("argv", [
    ["min", "--cosine", "1,2,2"],
    ["min", "--cosine", "1,x"],
    ["min", "--cosine", "1,2", "--newman", "0,1"],
    ["min", "--cosine", "1,2", "--tol", "-1"],
    ["min", "--cosine", "1,2", "--bogus"],
    ["search", "lambda", "--n", "3"],
    ["verify", "nothing"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == EXIT_USAGE


def test_duplicate_is_named(capsys):
    with pytest.raises(SystemExit):
        main(["min", "--cosine", "1,5,5"])
    assert "duplicate exponent 5" in capsys.readouterr().err


def test_invalid_set_values(capsys):
    code, _, err = run(capsys, "min", "--cosine", "0,1")
    assert code == EXIT_USAGE and "must be >= 1" in err


def test_tolerance_exit_code(capsys):
    code, _, err = run(capsys, "min", "--cosine", "1,2", "--tol", "1e-17")
    assert code == EXIT_TOL and "tolerance" in err


def test_search_trivial(capsys):
    code, out, _ = run(capsys, "search", "lambda", "--n", "2", "--max", "2", "--output", "json")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["best"][0]["set"] == [1, 2]
    assert doc["best"][0]["objective"] == pytest.approx(1.125, abs=1e-9)
    assert doc["best"][0]["min_value"] == pytest.approx(-1.125, abs=1e-9)


def test_search_empty_space(capsys):
    code, _, err = run(capsys, "search", "mu", "--n", "5", "--max", "3")
    assert code == EXIT_USAGE and "no canonical" in err


def test_search_json_independent_of_jobs(capsys):
    argv = ["search", "mu", "--n", "4", "--max", "16", "--top-k", "20", "--output", "json"]
    _, one, _ = run(capsys, *argv, "--jobs", "1")
    _, four, _ = run(capsys, *argv, "--jobs", "4")
    assert one == four


def test_search_report_and_csv(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, "search", "lambda", "--n", "3", "--max", "8", "--top-k", "2",
                       "--output", "csv", "--report", str(report))
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["set", "objective", "theta"] and rows[1][0] == "1,2,3"
    doc = json.loads(report.read_text())
    assert doc["spec"]["n"] == 3 and len(doc["best"]) == 2


def test_search_checkpoint_flags(capsys, tmp_path):
    ck = tmp_path / "ck.jsonl"
    base = ["search", "lambda", "--n", "2", "--max", "7", "--output", "json"]
    code, _, err = run(capsys, *base, "--resume")
    assert code == EXIT_USAGE and "--checkpoint" in err
    code, first, _ = run(capsys, *base, "--checkpoint", str(ck))
    assert code == EXIT_OK
    code, _, err = run(capsys, *base, "--checkpoint", str(ck))
    assert code == EXIT_USAGE and "--resume" in err
    code, again, _ = run(capsys, *base, "--checkpoint", str(ck), "--resume")
    assert code == EXIT_OK and again == first


def test_search_corrupt_checkpoint(capsys, tmp_path):
    ck = tmp_path / "ck.jsonl"
    ck.write_text("{oops}\n")
    code, _, err = run(capsys, "search", "lambda", "--n", "2", "--max", "7",
                       "--checkpoint", str(ck), "--resume")
    assert code == EXIT_CHECKPOINT and "corrupt" in err


def test_tables_quick(capsys):
    code, out, _ = run(capsys, "tables", "--quick", "--output", "json")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert [(r["problem"], r["n"]) for r in doc["rows"]] == [
        ("lambda", 2), ("lambda", 3), ("lambda", 4), ("mu", 3), ("mu", 4)]
    assert all(r["match"] for r in doc["rows"])


def test_tables_mismatch_exit(capsys, monkeypatch):
    monkeypatch.setitem(cli.KNOWN_LAMBDA, 2, (1.2, (1, 2)))
    code, out, _ = run(capsys, "tables", "--quick")
    assert code == EXIT_VERIFY and "NO" in out


@pytest.mark.parametrize("claim,flags", [
    ("lemma1", []), ("lemma2", []), ("thm2", ["--max-a2", "40"]),
    ("thm3", ["--max-a3", "20"]), ("cosinesum", []), ("variance", []),
])
def test_verify_claims(capsys, claim, flags):
    code, out, _ = run(capsys, "verify", claim, *flags, "--output", "json")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["summary"][0]["claim"] == claim
    assert all(r["pass"] for r in doc["records"])
    assert set(doc["records"][0]) == {"claim", "inputs", "witness", "pass"}


def test_verify_json_is_deterministic(capsys):
    _, a, _ = run(capsys, "verify", "variance", "--seed", "7", "--output", "json")
    _, b, _ = run(capsys, "verify", "variance", "--seed", "7", "--output", "json")
    _, c, _ = run(capsys, "verify", "variance", "--seed", "8", "--output", "json")
    assert a == b and a != c


def test_verify_failure_exit(capsys, monkeypatch):
    from cosmin import claims
    monkeypatch.setitem(claims.CLAIMS, "lemma1",
                        lambda **_: [claims.ClaimRecord("lemma1", [1, 2], None, False)])
    code, out, _ = run(capsys, "verify", "lemma1")
    assert code == EXIT_VERIFY and "FAILED lemma1" in out


def test_jobs_environment(monkeypatch):
    monkeypatch.setenv("COSMIN_JOBS", "3")
    assert cli.default_jobs() == 3
    monkeypatch.setenv("COSMIN_JOBS", "zero")
    assert cli.default_jobs() >= 1
    monkeypatch.delenv("COSMIN_JOBS")
    assert cli.default_jobs() >= 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cosmin", "min", "--cosine", "1,2,3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "-1.315565" in proc.stdout
