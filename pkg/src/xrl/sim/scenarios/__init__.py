"""Bundled business-process scenarios.

Each scenario is a pair of files: ``<name>.xrl.yaml`` (the process) and
``<name>.env.json`` holding the initial environment and the hand-written
expected final environment.
"""

from __future__ import annotations

import json
from importlib import resources

from ...core.model import XrlDocument
from ...core.parser import parse_document
from ..env import VirtualEnv

SCENARIOS = ("p1_search_email", "p2_db_report", "p3_excel_crm")


class UnknownScenarioError(KeyError):
    pass


def _read(filename: str) -> str:
    return resources.files(__name__).joinpath(filename).read_text(encoding="utf-8")


def scenario_source(name: str) -> str:
    if name not in SCENARIOS:
        raise UnknownScenarioError(name)
    return _read(f"{name}.xrl.yaml")


def scenario_data(name: str) -> dict:
    if name not in SCENARIOS:
        raise UnknownScenarioError(name)
    return json.loads(_read(f"{name}.env.json"))


def load_scenario(name: str) -> tuple[XrlDocument, VirtualEnv, str]:
    """Return (document, initial environment, expected final digest)."""
    data = scenario_data(name)
    doc = parse_document(scenario_source(name))
    env0 = VirtualEnv.from_dict(data["initial"])
    expected = VirtualEnv.from_dict(data["expected_final"]).digest()
    return doc, env0, expected
