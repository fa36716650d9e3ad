"""``ddic`` command line: check scripts, answer queries, list conflicts, REPL.

Exit codes: 0 success, 1 an expectation failed, 2 parse or declaration error,
3 a same-time contradiction was found under ``--strict``.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Iterable, TextIO

from .conflict import ConflictReport, scan_conflicts
from .context import Formula, render
from .dsl import Expectation, Query, Script, parse_context, parse_script, parse_status
from .engine import StatusReport, derive_beliefs, store_diagnostics
from .errors import DdicError, ParseError
from .model import BeliefAtom, DerivationTrace, NormStore, TestimonyAtom

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2
EXIT_STRICT = 3


# --- JSON rendering -------------------------------------------------------------

def _atom_json(atom: BeliefAtom | TestimonyAtom) -> dict:
    out = {
        "polarity": "positive" if atom.positive else "negative",
        "modal": atom.modal.value,
        "behavior": atom.behavior,
        "context": render(atom.context),
        "time": atom.time,
        "text": str(atom),
    }
    if isinstance(atom, TestimonyAtom):
        out["origin"] = atom.origin.value
    return out


def _trace_json(trace: DerivationTrace) -> dict:
    return {
        "conclusion": _atom_json(trace.conclusion),
        "blocked": trace.blocked,
        "applications": [
            {"rule": app.rule, "premises": [_atom_json(p) for p in app.premises],
             "side_conditions": list(app.side_conditions)}
            for app in trace.applications],
        "defeats": [
            {"rule": d.rule, "stated": _atom_json(d.stated), "defeater": _atom_json(d.defeater),
             "path": list(d.path), "window": list(d.window), "justification": d.justification}
            for d in trace.defeats],
    }


def report_json(report: StatusReport) -> dict:
    return {
        "behavior": report.behavior,
        "context": render(report.context),
        "time": report.time,
        "label": report.label.value,
        "beliefs": [_atom_json(b) for b in report.sorted_beliefs()],
        "traces": [_trace_json(t) for t in report.traces],
        "diagnostics": list(report.diagnostics),
    }


def conflict_json(c: ConflictReport) -> dict:
    return {
        "kind": c.kind.value,
        "first": _atom_json(c.first),
        "second": _atom_json(c.second),
        "shared_behavior": c.shared_behavior,
        "shared_context": render(c.shared_context),
        "genuine": c.genuine,
        "note": c.note,
    }


def _error_json(err: Exception) -> dict:
    out = {"message": str(err)}
    if isinstance(err, ParseError):
        out.update(line=err.line, column=err.column, expected=err.expected, found=err.found)
    return out


# --- text rendering -------------------------------------------------------------

def render_trace(trace: DerivationTrace) -> list[str]:
    app = trace.applications[0]
    verb = "blocked" if trace.blocked else "derived"
    premises = ", ".join(str(p) for p in app.premises)
    side = f" [{'; '.join(app.side_conditions)}]" if app.side_conditions else ""
    lines = [f"{verb} {trace.conclusion} by {app.rule} from {premises}{side}"]
    for d in trace.defeats:
        t, tx, tn = d.window
        lines.append(f"  defeated ({d.rule}) by {d.defeater} via {' -> '.join(d.path)}, "
                     f"window {t} <= {tx} <= {tn}")
    return lines


def render_report(report: StatusReport, trace: bool = False) -> list[str]:
    lines = [f"{report.behavior} @{report.time} ({render(report.context)}): {report.label.value}"]
    lines += [f"  {b}" for b in report.sorted_beliefs()]
    if trace:
        lines.append("  trace:")
        for tr in report.traces:
            lines += [f"    {line}" for line in render_trace(tr)]
    lines += [f"  warning: {d}" for d in report.diagnostics]
    return lines


def render_conflict(c: ConflictReport) -> str:
    genuine = "genuine" if c.genuine else "not genuine"
    return (f"{c.kind.value}: {c.first} vs {c.second} at {c.shared_behavior} "
            f"({render(c.shared_context)}), {genuine}: {c.note}")


# --- evaluation shared by check and the REPL ------------------------------------

class _Evaluator:
    """Caches one derive_beliefs run per (context, time)."""

    def __init__(self, store: NormStore):
        self.store = store
        self._cache: dict[tuple[Formula, int], dict[str, StatusReport]] = {}

    def report(self, behavior: str, context: Formula, time: int) -> StatusReport:
        key = (context, time)
        if key not in self._cache:
            self._cache[key] = derive_beliefs(self.store, context, time)
        return self._cache[key][behavior]

    def expectation(self, e: Expectation) -> bool:
        held = e.atom() in self.report(e.behavior, e.context, e.time).beliefs
        return held == e.present


def _query_lines(ev: _Evaluator, q: Query) -> list[str]:
    return render_report(ev.report(q.behavior, q.context, q.time))


def _expectation_line(passed: bool, e: Expectation) -> str:
    return f"{'ok  ' if passed else 'FAIL'} line {e.line}: {e}"


# --- subcommands ----------------------------------------------------------------

def _streams(out: TextIO | None, err_out: TextIO | None) -> tuple[TextIO, TextIO]:
    # looked up per call so redirected sys.stdout/sys.stderr are honored
    return (sys.stdout if out is None else out, sys.stderr if err_out is None else err_out)


def _load(path: str) -> Script:
    return parse_script(Path(path).read_text(encoding="utf-8"))


def _emit_error(err: Exception, as_json: bool, command: str, out: TextIO, err_out: TextIO) -> int:
    if as_json:
        json.dump({"schema": SCHEMA_VERSION, "command": command, "exit_code": EXIT_ERROR,
                   "error": _error_json(err)}, out, indent=2)
        out.write("\n")
    else:
        err_out.write(f"error: {err}\n")
    return EXIT_ERROR


def cmd_check(path: str, strict: bool = False, as_json: bool = False,
              out: TextIO | None = None, err_out: TextIO | None = None) -> int:
    out, err_out = _streams(out, err_out)
    try:
        script = _load(path)
        store = script.store()
        ev = _Evaluator(store)
        queries = [(q, ev.report(q.behavior, q.context, q.time)) for q in script.queries]
        results = [(e, ev.expectation(e)) for e in script.expectations]
        diagnostics = [d.message for d in store_diagnostics(store)]
        conflicts = scan_conflicts(store)
    except (DdicError, OSError) as err:
        return _emit_error(err, as_json, "check", out, err_out)

    failed = sum(not ok for _, ok in results)
    if failed:
        code = EXIT_FAILED
    elif strict and diagnostics:
        code = EXIT_STRICT
    else:
        code = EXIT_OK

    if as_json:
        json.dump({
            "schema": SCHEMA_VERSION,
            "command": "check",
            "file": str(path),
            "exit_code": code,
            "queries": [dict(report_json(r), line=q.line) for q, r in queries],
            "expectations": [{"line": e.line, "text": str(e), "expect_present": e.present,
                              "atom": _atom_json(e.atom()), "passed": ok} for e, ok in results],
            "conflicts": [conflict_json(c) for c in conflicts],
            "diagnostics": diagnostics,
            "summary": {"expectations": len(results), "failed": failed},
        }, out, indent=2)
        out.write("\n")
        return code

    for q, _ in queries:
        out.write("\n".join(_query_lines(ev, q)) + "\n")
    for e, ok in results:
        out.write(_expectation_line(ok, e) + "\n")
    for d in diagnostics:
        out.write(f"warning: {d}\n")
    out.write(f"{len(results)} expectations: {len(results) - failed} passed, {failed} failed\n")
    return code


# most severe first
_SEVERITY = (EXIT_ERROR, EXIT_FAILED, EXIT_STRICT, EXIT_OK)


def check_many(paths: Iterable[str], strict: bool = False,
               out: TextIO | None = None, err_out: TextIO | None = None) -> int:
    """Check several scripts in one process; returns the most severe exit code."""
    out, err_out = _streams(out, err_out)
    codes = []
    for path in paths:
        out.write(f"== {path}\n")
        out.flush()
        codes.append(cmd_check(path, strict, False, out, err_out))
    return min(codes, key=_SEVERITY.index)


def cmd_query(path: str, behavior: str, context_text: str, time: int | None = None,
              trace: bool = False, as_json: bool = False,
              out: TextIO | None = None, err_out: TextIO | None = None) -> int:
    out, err_out = _streams(out, err_out)
    try:
        script = _load(path)
        store = script.store()
        context = parse_context(context_text, declared=store.context_atoms)
        store.ontology.require(behavior)
        report = derive_beliefs(store, context, time)[behavior]
        conflicts = scan_conflicts(store)
    except (DdicError, OSError) as err:
        return _emit_error(err, as_json, "query", out, err_out)
    if as_json:
        json.dump(dict(report_json(report), schema=SCHEMA_VERSION, command="query",
                       exit_code=EXIT_OK, conflicts=[conflict_json(c) for c in conflicts]),
                  out, indent=2)
        out.write("\n")
    else:
        out.write("\n".join(render_report(report, trace)) + "\n")
    return EXIT_OK


def cmd_conflicts(path: str, as_json: bool = False,
                  out: TextIO | None = None, err_out: TextIO | None = None) -> int:
    out, err_out = _streams(out, err_out)
    try:
        conflicts = scan_conflicts(_load(path).store())
    except (DdicError, OSError) as err:
        return _emit_error(err, as_json, "conflicts", out, err_out)
    if as_json:
        json.dump({"schema": SCHEMA_VERSION, "command": "conflicts", "exit_code": EXIT_OK,
                   "conflicts": [conflict_json(c) for c in conflicts]}, out, indent=2)
        out.write("\n")
    elif not conflicts:
        out.write("no conflicts\n")
    else:
        for c in conflicts:
            out.write(render_conflict(c) + "\n")
    return EXIT_OK


class Session:
    """Line-at-a-time REPL state; every accepted line yields a new store snapshot."""

    def __init__(self):
        self.lines: list[str] = []
        self.script = Script()
        self.finished = False

    def feed(self, line: str) -> list[str]:
        stripped = line.split("#", 1)[0].strip()
        if stripped == "quit":
            self.finished = True
            self.lines.append("")
            return []
        if stripped.startswith("status") and stripped[6:7] in (" ", "\t", ""):
            self.lines.append("")
            try:
                behavior, context = parse_status(stripped[6:])
                store = self.script.store()
                store.ontology.require(behavior)
                report = derive_beliefs(store, parse_context(render(context), store.context_atoms))
                return [report[behavior].label.value] + [f"warning: {d}" for d in
                                                       report[behavior].diagnostics]
            except DdicError as err:
                return [f"error: {err}"]
        try:
            script = parse_script("\n".join(self.lines + [line]))
        except ParseError as err:
            self.lines.append("")
            return [f"error: {err}"]
        self.lines.append(line)
        old, self.script = self.script, script
        out = []
        ev = _Evaluator(script.store())
        for q in script.queries[len(old.queries):]:
            out += _query_lines(ev, q)
        for e in script.expectations[len(old.expectations):]:
            out.append(_expectation_line(ev.expectation(e), e))
        return out


def cmd_repl(path: str | None = None, stdin: TextIO = sys.stdin,
             out: TextIO | None = None, err_out: TextIO | None = None) -> int:
    out, err_out = _streams(out, err_out)
    session = Session()
    if path is not None:
        try:
            seed = Path(path).read_text(encoding="utf-8")
            parse_script(seed)
        except (DdicError, OSError) as err:
            err_out.write(f"error: {err}\n")
            return EXIT_ERROR
        for line in seed.split("\n"):
            for msg in session.feed(line.rstrip("\r")):
                out.write(msg + "\n")
    interactive = stdin.isatty()
    while not session.finished:
        if interactive:
            out.write("ddic> ")
            out.flush()
        line = stdin.readline()
        if not line:
            break
        for msg in session.feed(line.rstrip("\r\n")):
            out.write(msg + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ddic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="evaluate every query and expect line of a script")
    check.add_argument("paths", nargs="+", metavar="path")
    check.add_argument("--strict", action="store_true",
                       help="exit 3 when same-time contradictions are present")
    check.add_argument("--json", action="store_true")

    query = sub.add_parser("query", help="deontic status of one behavior")
    query.add_argument("path")
    query.add_argument("behavior")
    query.add_argument("context", help='context formula, e.g. "Monday & Morning"')
    query.add_argument("time", nargs="?", type=int,
                       help="query time (default: latest stated timestamp)")
    query.add_argument("--at", type=int, dest="at", help="same as the positional time")
    query.add_argument("--trace", action="store_true")
    query.add_argument("--json", action="store_true")

    repl = sub.add_parser("repl", help="interactive session reading script lines from stdin")
    repl.add_argument("path", nargs="?")

    conflicts = sub.add_parser("conflicts", help="list conflicting pairs of stated norms")
    conflicts.add_argument("path")
    conflicts.add_argument("--json", action="store_true")
    return parser


def main(argv: Iterable[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check":
        if len(args.paths) == 1:
            return cmd_check(args.paths[0], args.strict, args.json)
        if args.json:
            sys.stderr.write("error: --json takes a single script\n")
            return EXIT_ERROR
        return check_many(args.paths, args.strict)
    if args.command == "query":
        if args.time is not None and args.at is not None and args.time != args.at:
            sys.stderr.write("error: conflicting query times\n")
            return EXIT_ERROR
        time = args.time if args.time is not None else args.at
        return cmd_query(args.path, args.behavior, args.context, time, args.trace, args.json)
    if args.command == "repl":
        return cmd_repl(args.path)
    return cmd_conflicts(args.path, args.json)


if __name__ == "__main__":
    sys.exit(main())
