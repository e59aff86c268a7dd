from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from minmult.cli import main
from minmult.report import ReportDocument


def run(*args):
    return CliRunner().invoke(main, list(args))


def test_resolve_omega_json():
    r = run("resolve", "ex_minmult_r", "--module", "omega", "--length", "4", "--format", "json")
    assert r.exit_code == 0, r.output
    doc = ReportDocument.from_json(r.output)
    assert doc.results["betti"] == ["2", "3", "6", "12", "24"]
    assert ReportDocument.from_json(doc.to_json()) == doc


def test_param_override():
    r = run("resolve", "ex_minmult_r", "--param", "r=3", "--module", "omega", "--length", "3", "--format", "json")
    assert json.loads(r.output)["results"]["betti"] == ["3", "8", "24", "72"]


def test_hmm_check_on_alpha_example():
    r = run("hmm-check", "ex_alpha", "--module", "M", "--t", "1", "--bound", "4", "--format", "json")
    assert r.exit_code == 0, r.output
    res = json.loads(r.output)["results"]
    assert res["certified"] and res["type"] == ["2", "6", "1"]


def test_rejected_certificate_exits_one():
    r = run("hmm-check", "ex_minmult_r", "--module", "k", "--bound", "3")
    assert r.exit_code == 1


@pytest.mark.parametrize("args", [
    ["resolve", "no_such_file"],
    ["resolve", "ex_alpha", "--param", "alpha=1"],
    ["resolve", "ex_alpha", "--module", "Q"],
    ["resolve", "ex_alpha", "--length", "0"],
    ["resolve", "ex_alpha", "--field", "fp 100"],
    ["class-check", "ex_alpha", "--class", "gorenstein"],
    ["complete-resolution", "ex_kunneth"],
])
def test_input_errors_exit_two(args):
    r = run(*args)
    assert r.exit_code == 2
    assert "input error" in r.output


def test_malformed_file_reports_location(tmp_path):
    p = tmp_path / "bad.ring"
    p.write_text("field fp 7\nvars x\nnilpotency 2\nideal\n  x^\n")
    r = run("invariants", str(p))
    assert r.exit_code == 2 and "line 5, column 5" in r.output


def test_every_command_runs(tmp_path):
    for cmd, extra in [("invariants", []), ("canonical", []), ("dual", ["--module", "M"]),
                       ("tor", ["--module", "M", "--with", "omega"]), ("ext", ["--module", "k", "--with", "omega"]),
                       ("class-check", ["--module", "omega", "--class", "bass"]),
                       ("shmm-check", ["--module", "M"]), ("betti-laws", ["--module", "M"]),
                       ("poincare", ["--module", "omega"]), ("complete-resolution", [])]:
        r = run(cmd, "ex_alpha", "--bound", "3", "--length", "3", "--cache-dir", str(tmp_path), *extra)
        assert r.exit_code == 0, (cmd, r.output)


def test_repeat_resolve_hits_cache(tmp_path):
    args = ["resolve", "ex_alpha", "--module", "omega", "--length", "3", "--cache-dir", str(tmp_path),
            "--format", "json"]
    a, b = run(*args), run(*args)
    assert a.exit_code == b.exit_code == 0
    assert json.loads(a.output)["results"] == json.loads(b.output)["results"]
    assert list(tmp_path.glob("*.npz"))


def test_tasks_command():
    r = run("tasks", "ex_minmult_r", "--format", "json", "--length", "3", "--bound", "3")
    assert r.exit_code == 0, r.output
    docs = [ReportDocument.from_dict(d) for d in json.loads(r.output)]
    assert [d.command for d in docs] == ["resolve", "shmm-check"]
    assert docs[0].results["betti"][:3] == ["2", "3", "6"]


def test_bundled_checks_command():
    r = run("verify-paper", "--quick")
    assert r.exit_code == 0, r.output
    assert "checks passed" in r.output
