import io
import json
import random
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from conftest import SCRIPTS
from ddic.cli import Session, check_many, cmd_check, cmd_conflicts, cmd_query, cmd_repl, main
from gen import CONTEXTS
from ddic.context import render

SCHEMA = json.loads(resources.files("ddic").joinpath("report.schema.json").read_text())
VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)
THEOREMS = sorted(SCRIPTS.glob("theorem-*.ddic"))


def run(fn, *args, **kwargs):
    out, err = io.StringIO(), io.StringIO()
    code = fn(*args, out=out, err_out=err, **kwargs)
    return code, out.getvalue(), err.getvalue()


def test_check_passes():
    code, out, _ = run(cmd_check, str(SCRIPTS / "theorem-01a.ddic"))
    assert code == 0
    assert "2 expectations: 2 passed, 0 failed" in out


def test_check_reports_failed_expectation(tmp_path):
    text = (SCRIPTS / "theorem-01a.ddic").read_text()
    bad = text.replace("expect @3 Imp(HC", "expect not @3 Imp(HC")
    path = tmp_path / "bad.ddic"
    path.write_text(bad)
    code, out, _ = run(cmd_check, str(path))
    assert code == 1
    line = bad.splitlines().index("expect not @3 Imp(HC, Monday & Morning)") + 1
    assert f"FAIL line {line}: expect not @3 Imp(HC, Monday & Morning)" in out


def test_check_reports_parse_error(tmp_path):
    path = tmp_path / "broken.ddic"
    path.write_text("action HC\ncontext Monday\n@1 obl(HC Monday)\n")
    code, out, err = run(cmd_check, str(path))
    assert code == 2 and out == ""
    assert err == "error: 3:11: expected ',', found 'Monday'\n"
    code, out, _ = run(cmd_check, str(path), as_json=True)
    doc = json.loads(out)
    assert code == 2 and doc["error"]["line"] == 3 and doc["error"]["column"] == 11
    VALIDATOR.validate(doc)


def test_check_missing_file(tmp_path):
    code, _, err = run(cmd_check, str(tmp_path / "nope.ddic"))
    assert code == 2 and err.startswith("error:")


def test_strict_promotes_same_time_contradiction(tmp_path):
    path = tmp_path / "same.ddic"
    path.write_text("action a\n@1 obl(a, true)\n@1 imp(a, true)\nexpect not @1 Obl(a, true)\n")
    assert run(cmd_check, str(path))[0] == 0
    code, out, _ = run(cmd_check, str(path), strict=True)
    assert code == 3 and "warning: contradictory testimony" in out


def test_exit_code_is_a_function_of_content(tmp_path):
    text = (SCRIPTS / "theorem-09.ddic").read_text()
    a, b = tmp_path / "a.ddic", tmp_path / "b.ddic"
    a.write_text(text)
    b.write_text(text)
    assert run(cmd_check, str(a))[:2] == run(cmd_check, str(b))[:2]


def test_query_prints_label():
    code, out, _ = run(cmd_query, str(SCRIPTS / "theorem-09.ddic"), "HCV", "Monday & Morning", 3)
    assert code == 0
    assert out.splitlines()[0] == "HCV @3 (Monday & Morning): Obligatory"


def test_query_trace_shows_defeater():
    _, out, _ = run(cmd_query, str(SCRIPTS / "theorem-09.ddic"), "HCV", "Monday & Morning", 3,
                    trace=True)
    assert ("blocked Imp(HCV, Monday & Morning, 3) by R3 from imp(CV, Monday, 1)" in out)
    assert "defeated (R3) by ~imp(HCV, Morning, 2) via HCV -> HCV -> CV, window 1 <= 2 <= 3" in out


def test_query_undeclared_action():
    code, _, err = run(cmd_query, str(SCRIPTS / "theorem-09.ddic"), "XX", "Monday", 3)
    assert code == 2 and "undeclared action" in err


def test_query_undeclared_context():
    code, _, err = run(cmd_query, str(SCRIPTS / "theorem-09.ddic"), "HCV", "Tuesday", 3)
    assert code == 2 and "declared context" in err


def test_query_defaults_to_latest_time():
    _, out, _ = run(cmd_query, str(SCRIPTS / "theorem-09.ddic"), "HCV", "Monday & Morning")
    assert out.startswith("HCV @2 ")


def test_conflicts_direct():
    code, out, _ = run(cmd_conflicts, str(SCRIPTS / "theorem-01a.ddic"))
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 1 and lines[0].startswith("Direct:") and ", genuine:" in lines[0]


def test_conflicts_not_genuine():
    _, out, _ = run(cmd_conflicts, str(SCRIPTS / "theorem-02.ddic"))
    (line,) = out.splitlines()
    assert line.startswith("Indirect:") and "not genuine: no actual conflict" in line


def test_conflicts_none():
    code, out, _ = run(cmd_conflicts, str(SCRIPTS / "conflict-free.ddic"))
    assert code == 0 and out == "no conflicts\n"


def test_repl_session():
    s = Session()
    assert s.feed("action HC") == []
    assert s.feed("@1 obl(HC, true)") == []
    assert s.feed("status HC, true") == ["Obligatory"]
    s.feed("@2 imp(HC, true)")
    assert s.feed("status HC, true") == ["Impermissible"]
    assert s.feed("status XX, true")[0].startswith("error: ")
    assert s.feed("@3 obl(HC true)") == ["error: 7:11: expected ',', found 'true'"]
    assert s.feed("status HC, true") == ["Impermissible"]
    assert not s.finished
    s.feed("quit")
    assert s.finished


def test_repl_reads_stdin_until_quit():
    stdin = io.StringIO("action HC\n@1 obl(HC, true)\nstatus HC, true\nquit\nstatus HC, true\n")
    out, err = io.StringIO(), io.StringIO()
    assert cmd_repl(None, stdin=stdin, out=out, err_out=err) == 0
    assert out.getvalue() == "Obligatory\n"


def test_repl_seed_file():
    stdin = io.StringIO("status HCV, Monday & Morning\n")
    out = io.StringIO()
    assert cmd_repl(str(SCRIPTS / "theorem-09.ddic"), stdin=stdin, out=out,
                    err_out=io.StringIO()) == 0
    lines = out.getvalue().splitlines()
    assert lines[-1] == "Obligatory"
    assert "ok   line 24: expect not @3 Imp(HCV, Monday & Morning)" in lines


def _random_lines(rng):
    # declarations first: the REPL rejects a line naming something not yet declared
    lines = ["action H", "action C", "action HC", "action CV", "action HCV", "action CP",
             "entails HC -> H", "entails HC -> C", "entails CV -> C", "entails HCV -> HC",
             "entails HCV -> CV", "entails CP -> CV", "context Monday", "context Morning"]
    nodes = ["H", "C", "HC", "CV", "HCV", "CP"]
    for _ in range(rng.randint(4, 10)):
        ctx = render(rng.choice(CONTEXTS))
        kind = rng.randrange(4)
        if kind < 2:
            lines.append(f"@{rng.randint(0, 5)} {rng.choice(['obl', 'imp', 'opt'])}"
                         f"({rng.choice(nodes)}, {ctx})")
        elif kind == 2:
            lines.append(f"query @{rng.randint(0, 6)} ({rng.choice(nodes)}, {ctx})")
        else:
            sign = rng.choice(["", "~"])
            lines.append(f"expect {rng.choice(['', 'not '])}@{rng.randint(0, 6)} "
                         f"{sign}{rng.choice(['Obl', 'Imp'])}({rng.choice(nodes)}, {ctx})")
    return lines


@pytest.mark.parametrize("seed", range(20))
def test_repl_matches_check_on_every_prefix(seed, tmp_path):
    lines = _random_lines(random.Random(seed))
    session = Session()
    for n, line in enumerate(lines, start=1):
        shown = session.feed(line)
        if not shown:
            continue
        path = tmp_path / f"prefix{n}.ddic"
        path.write_text("\n".join(lines[:n]) + "\n")
        _, out, _ = run(cmd_check, str(path))
        checked = out.splitlines()
        starts = [i for i, x in enumerate(checked) if x == shown[0]]
        assert any(checked[i:i + len(shown)] == shown for i in starts), (shown, checked)


@pytest.mark.parametrize("path", THEOREMS, ids=lambda p: p.name)
def test_json_matches_human_output(path):
    _, human, _ = run(cmd_check, str(path))
    _, machine, _ = run(cmd_check, str(path), as_json=True)
    doc = json.loads(machine)
    VALIDATOR.validate(doc)
    assert doc["schema"] == 1
    for e in doc["expectations"]:
        mark = "ok  " if e["passed"] else "FAIL"
        assert f"{mark} line {e['line']}: {e['text']}" in human
    for q in doc["queries"]:
        assert f"{q['behavior']} @{q['time']} ({q['context']}): {q['label']}" in human
        for b in q["beliefs"]:
            assert f"  {b['text']}" in human
        assert q["traces"]


@pytest.mark.parametrize("path", THEOREMS, ids=lambda p: p.name)
def test_query_and_conflicts_json_validate(path):
    _, out, _ = run(cmd_query, str(path), "HCV", "Monday & Morning", 3, as_json=True)
    doc = json.loads(out)
    VALIDATOR.validate(doc)
    assert {"label", "beliefs", "traces", "conflicts", "diagnostics"} <= set(doc)
    _, out, _ = run(cmd_conflicts, str(path), as_json=True)
    VALIDATOR.validate(json.loads(out))


def test_schema_rejects_malformed_documents():
    _, out, _ = run(cmd_check, str(SCRIPTS / "theorem-01a.ddic"), as_json=True)
    doc = json.loads(out)
    doc["queries"][0]["label"] = "Maybe"
    assert not VALIDATOR.is_valid(doc)
    doc = json.loads(out)
    doc["schema"] = 2
    assert not VALIDATOR.is_valid(doc)


def test_main_dispatch(capsys):
    assert main(["query", str(SCRIPTS / "theorem-12.ddic"), "HCV", "Monday & Morning",
                 "--at", "3"]) == 0
    assert capsys.readouterr().out.startswith("HCV @3 (Monday & Morning): Impermissible")
    assert main(["query", str(SCRIPTS / "theorem-12.ddic"), "HCV", "Monday", "3",
                 "--at", "2"]) == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ddic.cli", "check",
                           str(SCRIPTS / "theorem-01b.ddic")], capture_output=True, text=True)
    assert proc.returncode == 0 and "0 failed" in proc.stdout


def test_check_many_reports_most_severe_code(tmp_path):
    broken = tmp_path / "broken.ddic"
    broken.write_text("action\n")
    good = str(SCRIPTS / "theorem-01a.ddic")
    code, out, _ = run(check_many, [good, str(SCRIPTS / "theorem-02.ddic")])
    assert code == 0 and out.count("== ") == 2
    assert run(check_many, [good, str(broken)])[0] == 2
    assert main(["check", "--json", good, good]) == 2
