"""Conversion to and from GAX, a neutral XML exchange format for processes.

The schema is documented in ``docs/gax.rnc``.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from xml.parsers import expat

from .core.diagnostics import Diagnostic, DiagnosticError, Location
from .core.formatter import format_scalar
from .core.guid import GuidError, parse_guid
from .core.model import ActionUse, ElementDef, FlowEntry, NodeDecl, XrlDocument

XML_DECLARATION = '<?xml version="1.0" encoding="UTF-8"?>\n'


class GaxImportError(DiagnosticError):
    pass


# -- export ------------------------------------------------------------------

def _type_of(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, float):
        return "float"
    return "str"


def _param_elements(parent: ET.Element, params: dict) -> None:
    for key, value in params.items():
        el = ET.SubElement(parent, "param", {"name": key, "type": _type_of(value)})
        if value is not None and value != "":
            el.text = format_scalar(value) if not isinstance(value, str) else value


def export_gax(doc: XrlDocument) -> str:
    """Serialize every node, element, parameter and edge of ``doc``."""
    root = ET.Element("process")
    identifiers = ET.SubElement(root, "identifiers")
    for n in doc.nodes:
        ET.SubElement(identifiers, "identifier", {"name": n.name, "id": n.id, "anchor": n.anchor})
    elements = ET.SubElement(root, "elements")
    for el in doc.elements:
        node = ET.SubElement(
            elements,
            "element",
            {"name": el.name, "anchor": el.anchor, "composite": "true" if el.is_composite else "false"},
        )
        ET.SubElement(node, "text").text = el.text
        _param_elements(node, el.params)
        for step in el.steps or ():
            _param_elements(ET.SubElement(node, "step", {"ref": step.element}), step.overrides)
    ET.SubElement(root, "boundaries", {"start": doc.start, "end": doc.end})
    flow = ET.SubElement(root, "flow")
    for entry in doc.flow:
        node = ET.SubElement(flow, "node", {"id": entry.node})
        _param_elements(ET.SubElement(node, "action", {"ref": entry.action.element}), entry.action.overrides)
        for ref in entry.references_in:
            ET.SubElement(node, "in", {"ref": ref})
        for ref in entry.references_out:
            ET.SubElement(node, "out", {"ref": ref})
    ET.indent(root, space="  ")
    return XML_DECLARATION + ET.tostring(root, encoding="unicode") + "\n"


# -- import ------------------------------------------------------------------

def _parse_xml(text: str):
    builder = ET.TreeBuilder()
    positions: dict[int, tuple[int, int]] = {}
    parser = expat.ParserCreate()

    def start(tag, attrs):
        el = builder.start(tag, attrs)
        positions[id(el)] = (parser.CurrentLineNumber, parser.CurrentColumnNumber + 1)

    parser.StartElementHandler = start
    parser.EndElementHandler = builder.end
    parser.CharacterDataHandler = builder.data
    parser.Parse(text.encode("utf-8"), True)
    return builder.close(), positions


class _Reader:
    def __init__(self, positions):
        self.positions = positions
        self.diagnostics: list[Diagnostic] = []

    def error(self, code: str, message: str, el: ET.Element, path: str) -> None:
        line, col = self.positions.get(id(el), (1, 1))
        self.diagnostics.append(Diagnostic.of(code, message, Location(line, col, path)))

    def attr(self, el: ET.Element, name: str, path: str):
        if name not in el.attrib:
            self.error("XRL-G04", f"<{el.tag}> lacks attribute {name!r}", el, path)
            return None
        return el.attrib[name]

    def guid(self, el: ET.Element, name: str, path: str):
        raw = self.attr(el, name, path)
        if raw is None:
            return None
        try:
            return parse_guid(raw)
        except GuidError as exc:
            self.error("XRL-G03", str(exc), el, path)
            return None

    def child(self, el: ET.Element, tag: str, path: str):
        found = el.find(tag)
        if found is None:
            self.error("XRL-G04", f"<{el.tag}> lacks <{tag}>", el, path)
        return found

    def params(self, el: ET.Element, path: str) -> dict:
        out = {}
        for i, p in enumerate(el.findall("param")):
            ppath = f"{path}/param[{i}]"
            name = self.attr(p, "name", ppath)
            kind = p.attrib.get("type", "str")
            text = p.text or ""
            if name is None:
                continue
            if name in out:
                self.error("XRL-G04", f"duplicate parameter {name!r}", p, ppath)
                continue
            try:
                out[name] = _typed(kind, text)
            except ValueError as exc:
                self.error("XRL-G04", str(exc), p, ppath)
        return out


def _typed(kind: str, text: str):
    if kind == "str":
        return text
    if kind == "null":
        return None
    if kind == "bool":
        if text not in ("true", "false"):
            raise ValueError(f"bad boolean {text!r}")
        return text == "true"
    if kind == "int":
        return int(text)
    if kind == "float":
        return float(text)
    raise ValueError(f"unknown parameter type {kind!r}")


def import_gax(xml: str) -> XrlDocument:
    """Read a GAX document. Raises :class:`GaxImportError` with located diagnostics."""
    try:
        root, positions = _parse_xml(xml)
    except expat.ExpatError as exc:
        raise GaxImportError(
            [Diagnostic.of("XRL-G01", expat.ErrorString(exc.code), Location(exc.lineno, exc.offset + 1))]
        ) from None
    r = _Reader(positions)
    if root.tag != "process":
        r.error("XRL-G04", "root element must be <process>", root, "/")
        raise GaxImportError(r.diagnostics)

    nodes = []
    identifiers = r.child(root, "identifiers", "/process")
    for i, el in enumerate(identifiers.findall("identifier") if identifiers is not None else ()):
        path = f"/process/identifiers/identifier[{i}]"
        name = r.attr(el, "name", path)
        guid = r.guid(el, "id", path)
        if name is not None and guid is not None:
            nodes.append(NodeDecl(name, guid, el.attrib.get("anchor") or name))
    known_ids = {n.id for n in nodes}

    elements = []
    section = r.child(root, "elements", "/process")
    raw_steps = []
    for i, el in enumerate(section.findall("element") if section is not None else ()):
        path = f"/process/elements/element[{i}]"
        name = r.attr(el, "name", path)
        anchor = el.attrib.get("anchor") or name
        text_el = el.find("text")
        text = (text_el.text or "") if text_el is not None else ""
        params = r.params(el, path)
        steps = None
        if el.attrib.get("composite") == "true":
            steps = []
            for k, step in enumerate(el.findall("step")):
                spath = f"{path}/step[{k}]"
                ref = r.attr(step, "ref", spath)
                if ref is not None:
                    steps.append(ActionUse(ref, r.params(step, spath)))
                    raw_steps.append((ref, step, spath))
            steps = tuple(steps)
        if name is not None:
            elements.append(ElementDef(name, anchor, text, params, steps))
    anchors = {el.anchor for el in elements}
    for ref, step, spath in raw_steps:
        if ref not in anchors:
            r.error("XRL-G02", f"step refers to unknown element {ref!r}", step, spath)

    start = end = None
    bounds = r.child(root, "boundaries", "/process")
    if bounds is not None:
        start = r.guid(bounds, "start", "/process/boundaries")
        end = r.guid(bounds, "end", "/process/boundaries")
        for key, value in (("start", start), ("end", end)):
            if value is not None and value not in known_ids:
                r.error("XRL-G02", f"{key} refers to unknown id {value}", bounds, "/process/boundaries")

    flow = []
    flow_el = r.child(root, "flow", "/process")
    for i, el in enumerate(flow_el.findall("node") if flow_el is not None else ()):
        path = f"/process/flow/node[{i}]"
        guid = r.guid(el, "id", path)
        if guid is not None and guid not in known_ids:
            r.error("XRL-G02", f"flow node {guid} is not an identifier", el, path)
        action_el = r.child(el, "action", path)
        action = None
        if action_el is not None:
            ref = r.attr(action_el, "ref", f"{path}/action")
            if ref is not None and ref not in anchors:
                r.error("XRL-G02", f"action refers to unknown element {ref!r}", action_el, f"{path}/action")
            action = ActionUse(ref, r.params(action_el, f"{path}/action"))
        refs = {}
        for tag in ("in", "out"):
            seen = []
            for k, ref_el in enumerate(el.findall(tag)):
                rpath = f"{path}/{tag}[{k}]"
                ref = r.guid(ref_el, "ref", rpath)
                if ref is None:
                    continue
                if ref not in known_ids:
                    r.error("XRL-G02", f"<{tag}> refers to unknown id {ref}", ref_el, rpath)
                elif ref not in seen:
                    seen.append(ref)
            refs[tag] = tuple(seen)
        if guid is not None and action is not None:
            flow.append(FlowEntry(guid, action, refs["in"], refs["out"]))

    if r.diagnostics:
        raise GaxImportError(sorted(r.diagnostics, key=Diagnostic.sort_key))
    return XrlDocument(tuple(nodes), tuple(elements), start, end, tuple(flow))


# -- comparison ----------------------------------------------------------------

def _tagged(params: dict) -> dict:
    return {k: (type(v).__name__, v) for k, v in params.items()}


def _canonical(doc: XrlDocument):
    names = {el.anchor: el.name for el in doc.elements}

    def use(u: ActionUse):
        return (names.get(u.element, ("undefined", u.element)), _tagged(u.overrides))

    elements = sorted(
        (
            (
                el.name,
                el.text,
                _tagged(el.params),
                None if el.steps is None else tuple(use(s) for s in el.steps),
            )
            for el in doc.elements
        ),
        key=lambda t: t[0],
    )
    flow = sorted(
        (
            (e.node, use(e.action), frozenset(e.references_in), frozenset(e.references_out))
            for e in doc.flow
        ),
        key=lambda t: t[0],
    )
    return (sorted((n.name, n.id) for n in doc.nodes), elements, doc.start, doc.end, flow)


def semantic_equal(a: XrlDocument, b: XrlDocument) -> bool:
    """Equality ignoring anchor names and the order of references."""
    return _canonical(a) == _canonical(b)
