from __future__ import annotations

from pathlib import Path

import pytest

from xrl.core import parse_document
from xrl.sim.scenarios import SCENARIOS, scenario_source

CORPUS_DIR = Path(__file__).parent / "corpus"


def corpus_sources() -> dict[str, str]:
    """Every golden document: the fixture directory plus the bundled scenarios."""
    sources = {p.name.removesuffix(".xrl.yaml"): p.read_text(encoding="utf-8") for p in sorted(CORPUS_DIR.glob("*.xrl.yaml"))}
    for name in SCENARIOS:
        sources[name] = scenario_source(name)
    return sources


CORPUS = corpus_sources()


def load(name: str):
    return parse_document(CORPUS[name])


@pytest.fixture
def s1():
    return load("s1_linear")


@pytest.fixture
def s1_source():
    return CORPUS["s1_linear"]


# -- acceptance reporting ------------------------------------------------------------

ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion; echoed in the summary."""

    def report(key: str, passed: bool, detail: str) -> bool:
        line = f"{key} {'PASS' if passed else 'FAIL'} {detail}"
        ACCEPTANCE_LINES[key] = line
        print(line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
