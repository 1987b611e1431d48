"""Canonical concrete syntax.

Section order is fixed (nodes, elements, start, end, flow), indentation is
two spaces, every GUID literal is written once at its declaration and every
other occurrence is an alias. Comments are not preserved.
"""

from __future__ import annotations

import json
import re
from dataclasses import replace

import yaml

from .model import ActionUse, ElementDef, FlowEntry, NodeDecl, XrlDocument

_ANCHOR_UNSAFE = re.compile(r"[^A-Za-z0-9_\-]")
_PLAIN_START_FORBIDDEN = set("-?:,[]{}#&*!|>'\"%@` ")


def _anchor_base(name: str) -> str:
    return _ANCHOR_UNSAFE.sub("_", name) or "anchor"


def canonicalize_anchors(doc: XrlDocument) -> XrlDocument:
    """Rename every anchor after its declaration's name, nodes first.

    Collisions get ``_2``, ``_3``... suffixes in declaration order.
    """
    used: set[str] = set()

    def claim(name: str) -> str:
        base = _anchor_base(name)
        candidate, k = base, 2
        while candidate in used:
            candidate = f"{base}_{k}"
            k += 1
        used.add(candidate)
        return candidate

    nodes = tuple(replace(n, anchor=claim(n.name)) for n in doc.nodes)
    renamed: dict[str, str] = {}
    new_anchor = []
    for el in doc.elements:
        a = claim(el.name)
        new_anchor.append(a)
        renamed.setdefault(el.anchor, a)

    def remap(use: ActionUse) -> ActionUse:
        return ActionUse(renamed.get(use.element, use.element), use.overrides)

    elements = tuple(
        replace(
            el,
            anchor=a,
            steps=None if el.steps is None else tuple(remap(s) for s in el.steps),
        )
        for el, a in zip(doc.elements, new_anchor)
    )
    flow = tuple(replace(e, action=remap(e.action)) for e in doc.flow)
    return XrlDocument(nodes, elements, doc.start, doc.end, flow, spans=doc.spans)


def structurally_equal(a: XrlDocument, b: XrlDocument) -> bool:
    """Field-by-field equality with anchor names treated as non-semantic."""
    return canonicalize_anchors(a) == canonicalize_anchors(b)


def format_scalar(value) -> str:
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        text = repr(value)
        if "e" in text and "." not in text.split("e")[0]:
            mantissa, exp = text.split("e")
            text = f"{mantissa}.0e{exp}"
        elif "." not in text and "e" not in text:
            text += ".0"
        return text
    text = str(value)
    if _plain_ok(text):
        return text
    return json.dumps(text, ensure_ascii=False)


def _plain_ok(text: str) -> bool:
    if not text or text != text.strip() or text[0] in _PLAIN_START_FORBIDDEN:
        return False
    if any(ch in text for ch in "\n\r\t\\") or ": " in text or " #" in text:
        return False
    if text.endswith(":") or not text.isprintable():
        return False
    try:
        return yaml.safe_load(text) == text
    except yaml.YAMLError:
        return False


class _Emitter:
    def __init__(self, doc: XrlDocument):
        self.doc = doc
        self.lines: list[str] = []
        self.alias_of: dict[str, str] = {}
        for n in doc.nodes:
            self.alias_of.setdefault(n.id, n.anchor)

    def emit(self, indent: int, text: str) -> None:
        self.lines.append("  " * indent + text)

    def ref(self, guid: str) -> str:
        if guid in self.alias_of:
            return f"*{self.alias_of[guid]}"
        return format_scalar(guid)

    def params(self, indent: int, params: dict) -> None:
        if not params:
            self.emit(indent, "params: {}")
            return
        self.emit(indent, "params:")
        for key, value in params.items():
            self.emit(indent + 1, f"{format_scalar(key)}: {format_scalar(value)}")

    def action(self, indent: int, use: ActionUse) -> None:
        # indent is that of the mapping's first key
        self.emit(indent, f"<<: *{use.element}")
        if use.overrides:
            self.params(indent, use.overrides)

    def ref_list(self, indent: int, key: str, refs: tuple[str, ...]) -> None:
        if not refs:
            self.emit(indent, f"{key}: []")
            return
        self.emit(indent, f"{key}:")
        for r in refs:
            self.emit(indent + 1, f"- {self.ref(r)}")

    def node(self, n: NodeDecl) -> None:
        self.emit(1, f"- name: {format_scalar(n.name)}")
        self.emit(2, f"id: &{n.anchor} {format_scalar(n.id)}")

    def element(self, el: ElementDef) -> None:
        self.emit(1, f"- &{el.anchor}")
        self.emit(2, f"name: {format_scalar(el.name)}")
        self.emit(2, f"text: {format_scalar(el.text)}")
        self.params(2, el.params)
        if el.steps is not None:
            if not el.steps:
                self.emit(2, "steps: []")
            else:
                self.emit(2, "steps:")
                for step in el.steps:
                    self.lines.append("  " * 3 + "- " + f"<<: *{step.element}")
                    if step.overrides:
                        self.params(4, step.overrides)

    def flow_entry(self, e: FlowEntry) -> None:
        self.emit(1, f"- node: {self.ref(e.node)}")
        self.emit(2, "action:")
        self.action(3, e.action)
        self.ref_list(2, "references_in", e.references_in)
        self.ref_list(2, "references_out", e.references_out)

    def document(self) -> str:
        doc = self.doc
        self.section("nodes", doc.nodes, self.node)
        self.section("elements", doc.elements, self.element)
        self.emit(0, f"start: {self.ref(doc.start)}")
        self.emit(0, f"end: {self.ref(doc.end)}")
        self.section("flow", doc.flow, self.flow_entry)
        return "\n".join(self.lines) + "\n"

    def section(self, key: str, items, emit_one) -> None:
        if not items:
            self.emit(0, f"{key}: []")
            return
        self.emit(0, f"{key}:")
        for item in items:
            emit_one(item)


def format_canonical(doc: XrlDocument) -> str:
    """Render ``doc`` in canonical XRL syntax."""
    return _Emitter(canonicalize_anchors(doc)).document()
