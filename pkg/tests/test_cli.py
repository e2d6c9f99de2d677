import json
import subprocess
import sys
from pathlib import Path

import pytest

from markovfactor.cli import ProblemError, build_problem, emit, main, parse_problem, run
from markovfactor.relations import RELATIONS, describe

CORPUS = Path(__file__).resolve().parent.parent / "fixtures"
FILES = sorted(CORPUS.glob("*.json"))


def report_for(path, *extra, tmp_path):
    out = tmp_path / "report.json"
    code = main([str(path), "--out", str(out), *extra])
    return code, out.read_bytes()


def test_corpus_present():
    assert {p.stem for p in FILES} >= {"minimal", "identity", "abelian", "deterministic", "non_markov", "wrong_jhat"}


def test_abelian_file_parses():
    prob = parse_problem(CORPUS / "abelian.json")
    assert len(prob.spaces) == 2 and len(prob.maps) == 1 and len(prob.tasks) == 3


def test_minimal_file_gives_empty_report(tmp_path):
    code, data = report_for(CORPUS / "minimal.json", tmp_path=tmp_path)
    assert code == 0
    assert json.loads(data) == {}


@pytest.mark.parametrize("name,code,green", [
    ("identity", 0, 5),
    ("abelian", 0, 3),
    ("deterministic", 0, 5),
    ("non_markov", 0, 2),
    ("wrong_jhat", 1, 1),
])
def test_corpus_verdicts(name, code, green, tmp_path):
    got, data = report_for(CORPUS / f"{name}.json", tmp_path=tmp_path)
    assert got == code
    assert json.loads(data)["summary"]["pass"] == green


def test_non_markov_verdict(tmp_path):
    _, data = report_for(CORPUS / "non_markov.json", tmp_path=tmp_path)
    rec = json.loads(data)["tasks"][1]
    assert rec["flags"]["markov"] is False and rec["flags"]["consistent"] is True


def test_wrong_jhat_report(tmp_path):
    _, data = report_for(CORPUS / "wrong_jhat.json", tmp_path=tmp_path)
    tasks = json.loads(data)["tasks"]
    assert tasks[1]["certificate"]["valid"] is False
    assert "antiunij" in tasks[1]["failing"]
    assert tasks[2]["flags"]["certificate_emitted"] is False
    assert {"CCE-1", "CCE-2"} & set(tasks[2]["failing"])


@pytest.mark.parametrize("path", FILES, ids=lambda p: p.stem)
def test_every_emitted_name_is_registered(path):
    report = run(parse_problem(path))
    for rec in report.get("tasks", []):
        for name in rec["residuals"]:
            assert describe(name) == RELATIONS[name]


@pytest.mark.parametrize("path", FILES, ids=lambda p: p.stem)
def test_reports_repeat_byte_for_byte(path, tmp_path):
    outs = {report_for(path, tmp_path=tmp_path)[1] for _ in range(2)}
    assert len(outs) == 1


def test_malformed_density_reports_path(tmp_path):
    bad = {"spaces": {"a": {"ambient_dim": 1, "density": [[[1]]]}}}
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(bad))
    with pytest.raises(ProblemError, match=r"\$\.spaces\.a\.density\[0\]\[0\]"):
        parse_problem(p)
    assert main([str(p)]) == 2


def test_json_syntax_error_reports_line(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{\n  "spaces": {,\n}')
    with pytest.raises(ProblemError, match="line 2"):
        parse_problem(p)


def test_unknown_map_in_task():
    raw = {"spaces": {"a": {"ambient_dim": 1, "density": [[1]]}}, "tasks": [{"kind": "markov", "map": "nope"}]}
    with pytest.raises(ProblemError, match=r"\$\.tasks\[0\]\.map"):
        build_problem(raw)


def test_wrong_action_count():
    raw = {
        "spaces": {"a": {"ambient_dim": 2, "density": [[0.5, 0], [0, 0.5]]}},
        "maps": {"m": {"from": "a", "to": "a", "action": [[[1, 0], [0, 1]]]}},
    }
    with pytest.raises(ProblemError, match="expected 4 images"):
        build_problem(raw)


def test_tolerance_precedence(monkeypatch):
    raw = json.loads((CORPUS / "abelian.json").read_text())
    raw["tolerances"] = {"residual_pass": 1e-6}
    assert build_problem(raw).tol.residual_pass == 1e-6
    monkeypatch.setenv("VERIFY_TOL", "1e-5")
    assert build_problem(raw).tol.residual_pass == 1e-5
    assert build_problem(raw, 1e-4).tol.residual_pass == 1e-4


def test_text_format_lists_every_task():
    report = run(parse_problem(CORPUS / "identity.json"))
    text = emit(report, "text").decode()
    assert text.count("PASS") == 5
    assert text.rstrip().endswith("5/5 tasks green")


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "markovfactor", str(CORPUS / "abelian.json"), "--format", "text"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "3/3 tasks green" in proc.stdout
