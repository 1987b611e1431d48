from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import replace
from pathlib import Path

import pytest

from xrl.core import canonicalize_anchors, format_canonical
from xrl.interop import GaxImportError, export_gax, import_gax, semantic_equal
from xrl.validate import validate_document

from conftest import CORPUS, CORPUS_DIR, load

P1_GAX = (CORPUS_DIR / "p1_search_email.gax.xml").read_text(encoding="utf-8")


def import_codes(xml: str) -> list[str]:
    with pytest.raises(GaxImportError) as info:
        import_gax(xml)
    return [d.code for d in info.value.diagnostics]


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_round_trip_is_semantically_equal(name):
    doc = load(name)
    back = import_gax(export_gax(doc))
    assert semantic_equal(back, doc)
    assert [d.code for d in validate_document(back)] == [d.code for d in validate_document(doc)]


def test_s1_counts(s1):
    tree = ET.fromstring(export_gax(s1))
    assert len(tree.findall("./flow/node")) == 3
    assert len(tree.findall("./flow/node/out")) == 2
    assert len(tree.findall("./flow/node/in")) == 2


def test_declaration_and_determinism(s1):
    text = export_gax(s1)
    assert text.startswith('<?xml version="1.0" encoding="UTF-8"?>\n<process>')
    assert text == export_gax(load("s1_linear"))


def test_composite_elements_carry_steps():
    tree = ET.fromstring(export_gax(load("c1_composite")))
    (send,) = [e for e in tree.iter("element") if e.get("name") == "send_email"]
    assert send.get("composite") == "true"
    assert [s.get("ref") for s in send.findall("step")] == ["CLICK", "TYPE_TEXT", "TYPE_TEXT", "TYPE_TEXT", "CLICK"]


def test_empty_params_action_is_self_closed(s1):
    text = export_gax(s1)
    assert '<action ref="WAIT" />' in text


def test_types_are_preserved():
    doc = load("typed_params")
    back = import_gax(export_gax(doc))
    assert back.elements[0].params == doc.elements[0].params
    assert type(back.elements[0].params["verbose"]) is bool
    assert back.flow[0].action.overrides["label"] == "null"


def test_semantic_equality_ignores_anchors(s1):
    assert semantic_equal(s1, canonicalize_anchors(s1))


def test_semantic_equality_ignores_reference_order():
    doc = load("b1_branching")
    flow = list(doc.flow)
    flow[0] = replace(flow[0], references_out=tuple(reversed(flow[0].references_out)))
    assert semantic_equal(doc, replace(doc, flow=tuple(flow)))


def test_semantic_equality_sees_removed_edge(s1):
    flow = list(s1.flow)
    flow[0] = replace(flow[0], references_out=())
    assert not semantic_equal(s1, replace(s1, flow=tuple(flow)))


def test_semantic_equality_distinguishes_types(s1):
    flow = list(s1.flow)
    flow[2] = replace(flow[2], action=replace(flow[2].action, overrides={"ms": True}))
    other = list(s1.flow)
    other[2] = replace(other[2], action=replace(other[2].action, overrides={"ms": 1}))
    assert not semantic_equal(replace(s1, flow=tuple(flow)), replace(s1, flow=tuple(other)))


def test_hand_written_p1_equals_native():
    native = load("p1_search_email")
    imported = import_gax(P1_GAX)
    assert semantic_equal(imported, native)
    assert validate_document(imported) == []
    assert format_canonical(imported).count("2d63f67c-1f6b-5952-96c3-115770acaa54") == 1


def test_unknown_out_reference(s1):
    xml = export_gax(s1).replace(
        '<out ref="5b0f1c6e-2a41-4c8e-9d3b-7f1e2a9c0d02" />',
        '<out ref="c9f17853-52fe-5495-8f63-ad96786d9eb2" />',
    )
    assert import_codes(xml) == ["XRL-G02"]


@pytest.mark.parametrize(
    "mutate, code",
    [
        (lambda x: x.replace("</process>", ""), "XRL-G01"),
        (lambda x: x.replace('id="5b0f1c6e-2a41-4c8e-9d3b-7f1e2a9c0d01"', 'id="nope"'), "XRL-G03"),
        (lambda x: x.replace('<action ref="WAIT" />', '<action ref="SLEEP" />'), "XRL-G02"),
        (lambda x: x.replace("<boundaries", "<limits"), "XRL-G04"),
        (lambda x: x.replace('type="int">500', 'type="int">five'), "XRL-G04"),
    ],
    ids=["malformed", "bad-guid", "unknown-element", "missing-section", "bad-int"],
)
def test_import_errors(s1, mutate, code):
    assert code in import_codes(mutate(export_gax(s1)))


def test_import_diagnostics_are_located(s1):
    xml = export_gax(s1).replace('<action ref="WAIT" />', '<action ref="SLEEP" />')
    with pytest.raises(GaxImportError) as info:
        import_gax(xml)
    (diag,) = info.value.diagnostics
    line = next(i for i, l in enumerate(xml.splitlines(), 1) if "SLEEP" in l)
    assert diag.location.line == line


def test_schema_file_is_shipped():
    grammar = Path(__file__).parents[1] / "docs" / "gax.rnc"
    text = grammar.read_text(encoding="utf-8")
    for name in ("process", "identifiers", "elements", "boundaries", "flow", "step", "param"):
        assert f"element {name}" in text
