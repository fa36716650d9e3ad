import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ddic.context import And, Atom
from ddic.model import NormStore
from ddic.ontology import cooking_ontology

MON, MOR = Atom("Monday"), Atom("Morning")
DELTA = And(MON, MOR)
SCRIPTS = Path(__file__).resolve().parent.parent / "src" / "ddic" / "scripts"


def kitchen_store(*stated) -> NormStore:
    """Store over the kitchen ontology from ``(modal, behavior, context, time)`` tuples."""
    store = NormStore(cooking_ontology(), frozenset({"Monday", "Morning"}))
    for modal, behavior, context, time in stated:
        store = store.state(modal, behavior, context, time)
    return store


@pytest.fixture
def kitchen():
    return cooking_ontology()


# --- one summary line per acceptance criterion ------------------------------------

_CRITERIA: dict[int, str] = {}
_OUTCOMES: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            n, title = mark.args
            _CRITERIA[n] = title
            item.user_properties.append(("criterion", n))


def pytest_runtest_logreport(report):
    for key, n in report.user_properties:
        if key != "criterion":
            continue
        if report.when == "call" or report.outcome != "passed":
            _OUTCOMES.setdefault(n, []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        results = _OUTCOMES.get(n)
        if not results:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status}  {_CRITERIA[n]}")
