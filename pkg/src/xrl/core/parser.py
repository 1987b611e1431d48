"""Parse XRL source text into an :class:`XrlDocument`.

The YAML layer is PyYAML's composer, extended to remember anchor names and
alias positions. Binding happens on the composed node graph rather than on
constructed Python objects so merge keys can be traced back to the element
they reference and every diagnostic carries a source position.
"""

from __future__ import annotations

import math
from typing import Optional

import yaml
from yaml.events import AliasEvent
from yaml.nodes import MappingNode, Node, ScalarNode, SequenceNode

from .diagnostics import Diagnostic, DiagnosticError, Location
from .guid import GuidError, parse_guid
from .model import ActionUse, ElementDef, FlowEntry, NodeDecl, XrlDocument

SECTIONS = ("nodes", "elements", "start", "end", "flow")
MERGE_TAG = "tag:yaml.org,2002:merge"
_SCALAR_TAGS = {
    "tag:yaml.org,2002:str",
    "tag:yaml.org,2002:int",
    "tag:yaml.org,2002:float",
    "tag:yaml.org,2002:bool",
    "tag:yaml.org,2002:null",
}


class ParseError(DiagnosticError):
    pass


class TrackingLoader(yaml.SafeLoader):
    """SafeLoader whose composer tags nodes with ``anchor`` / ``alias`` attributes.

    Scalar aliases are returned as fresh nodes positioned at the alias so a
    reuse site can be told apart from its declaration.
    """

    def __init__(self, stream):
        super().__init__(stream)
        self.alias_sites: list[tuple[str, Node, yaml.Mark]] = []
        self.anchored: dict[str, Node] = {}

    def compose_node(self, parent, index):
        if self.check_event(AliasEvent):
            event = self.peek_event()
            target = super().compose_node(parent, index)
            self.alias_sites.append((event.anchor, target, event.start_mark))
            if isinstance(target, ScalarNode):
                site = ScalarNode(
                    target.tag, target.value, event.start_mark, event.end_mark, style=target.style
                )
                site.alias = event.anchor
                return site
            return target
        anchor = self.peek_event().anchor
        node = super().compose_node(parent, index)
        if anchor is not None:
            node.anchor = anchor
            self.anchored[anchor] = node
        return node


def compose(source: str) -> tuple[Optional[Node], TrackingLoader]:
    """Compose ``source`` into a YAML node graph. Raises ``yaml.YAMLError``."""
    loader = TrackingLoader(source)
    try:
        return loader.get_single_node(), loader
    finally:
        loader.dispose()


def _mark_location(mark, path: str = "") -> Location:
    if mark is None:
        return Location(1, 1, path)
    return Location(mark.line + 1, mark.column + 1, path)


def _yaml_error_diagnostic(exc: yaml.YAMLError) -> Diagnostic:
    problem = getattr(exc, "problem", None) or str(exc)
    context = getattr(exc, "context", None) or ""
    mark = getattr(exc, "problem_mark", None)
    if problem.startswith("found undefined alias"):
        return Diagnostic.of("XRL-P02", problem, _mark_location(mark))
    if context.startswith("found duplicate anchor"):
        name = context.split("'")[1] if "'" in context else "?"
        return Diagnostic.of("XRL-P03", f"found duplicate anchor {name!r}", _mark_location(mark))
    if problem.startswith("but found another document"):
        return Diagnostic.of(
            "XRL-P06", "expected a single YAML document", _mark_location(mark)
        )
    return Diagnostic.of("XRL-P01", problem, _mark_location(mark))


class _Binder:
    def __init__(self, loader: TrackingLoader):
        self.loader = loader
        self.diagnostics: list[Diagnostic] = []
        self.spans: dict[str, tuple[int, int]] = {}
        self.element_nodes: dict[int, str] = {}

    # -- helpers ---------------------------------------------------------
    def error(self, code: str, message: str, node: Optional[Node], path: str) -> None:
        mark = node.start_mark if node is not None else None
        self.diagnostics.append(Diagnostic.of(code, message, _mark_location(mark, path)))

    def note(self, path: str, node: Node) -> None:
        self.spans.setdefault(path, (node.start_mark.line + 1, node.start_mark.column + 1))

    def mapping(self, node: Node, path: str, allowed: tuple[str, ...], what: str):
        """Return {key: (key_node, value_node)} for a mapping with text keys."""
        if not isinstance(node, MappingNode):
            self.error("XRL-P06", f"{what} must be a mapping", node, path)
            return None
        out: dict[str, tuple[Node, Node]] = {}
        for key_node, value_node in node.value:
            if key_node.tag == MERGE_TAG:
                key = "<<"
            elif isinstance(key_node, ScalarNode):
                key = key_node.value
            else:
                self.error("XRL-P06", f"{what} keys must be plain text", key_node, path)
                continue
            if key in out:
                self.error("XRL-P08", f"duplicate key {key!r} in {what}", key_node, path)
                continue
            if key not in allowed:
                self.error("XRL-P06", f"unexpected key {key!r} in {what}", key_node, path)
                continue
            out[key] = (key_node, value_node)
        return out

    def text(self, node: Node, path: str, what: str) -> Optional[str]:
        if not isinstance(node, ScalarNode):
            self.error("XRL-P06", f"{what} must be a scalar", node, path)
            return None
        self.note(path, node)
        return node.value

    def scalar_value(self, node: Node, path: str):
        if not isinstance(node, ScalarNode) or node.tag not in _SCALAR_TAGS:
            self.error(
                "XRL-P07",
                "parameter values must be text, integer, real, boolean, or null",
                node,
                path,
            )
            return None
        self.note(path, node)
        try:
            value = self.loader.construct_object(node)
        except yaml.YAMLError as exc:
            self.error("XRL-P07", f"cannot read parameter value: {exc}", node, path)
            return None
        if isinstance(value, float) and not math.isfinite(value):
            self.error("XRL-P07", "non-finite reals are not supported", node, path)
            return None
        return value

    def guid_ref(self, node: Node, path: str) -> Optional[str]:
        if not isinstance(node, ScalarNode):
            self.error("XRL-P06", "expected a node GUID", node, path)
            return None
        self.note(path, node)
        return _normalize_guid(node.value)

    def sequence(self, node: Node, path: str, what: str) -> list[Node]:
        if isinstance(node, ScalarNode) and node.tag == "tag:yaml.org,2002:null":
            return []
        if not isinstance(node, SequenceNode):
            self.error("XRL-P06", f"{what} must be a list", node, path)
            return []
        self.note(path, node)
        return list(node.value)

    # -- sections --------------------------------------------------------
    def params(self, node: Node, path: str) -> dict:
        if isinstance(node, ScalarNode) and node.tag == "tag:yaml.org,2002:null":
            return {}
        fields = self.mapping(node, path, _ANY, "params")
        if fields is None:
            return {}
        self.note(path, node)
        out = {}
        for key, (_, value_node) in fields.items():
            out[key] = self.scalar_value(value_node, f"{path}.{key}")
        return out

    def node_decl(self, node: Node, path: str) -> Optional[NodeDecl]:
        fields = self.mapping(node, path, ("name", "id"), "node declaration")
        if fields is None:
            return None
        self.note(path, node)
        for required in ("name", "id"):
            if required not in fields:
                self.error("XRL-P06", f"node declaration lacks {required!r}", node, path)
        if "name" not in fields or "id" not in fields:
            return None
        name = self.text(fields["name"][1], f"{path}.name", "node name")
        id_node = fields["id"][1]
        raw = self.text(id_node, f"{path}.id", "node id")
        if name is None or raw is None:
            return None
        return NodeDecl(name, _normalize_guid(raw), getattr(id_node, "anchor", ""))

    def action_use(self, node: Node, path: str) -> Optional[ActionUse]:
        # `action: *ELEMENT` reuses an element verbatim
        if id(node) in self.element_nodes:
            self.note(path, node)
            return ActionUse(self.element_nodes[id(node)], {})
        fields = self.mapping(node, path, ("<<", "params"), "action")
        if fields is None:
            return None
        self.note(path, node)
        if "<<" not in fields:
            self.error("XRL-P06", "action must merge an element with '<<'", node, path)
            return None
        merged = fields["<<"][1]
        if isinstance(merged, SequenceNode):
            self.error(
                "XRL-P06", "action must merge exactly one element", merged, f"{path}.<<"
            )
            return None
        if not isinstance(merged, MappingNode):
            self.error(
                "XRL-P04", "merge key applied to a non-mapping value", merged, f"{path}.<<"
            )
            return None
        anchor = getattr(merged, "anchor", None)
        if anchor is None:
            self.error(
                "XRL-P06", "merge key must alias an element definition", merged, f"{path}.<<"
            )
            return None
        self.note(f"{path}.<<", merged)
        overrides = {}
        if "params" in fields:
            overrides = self.params(fields["params"][1], f"{path}.params")
        return ActionUse(anchor, overrides)

    def element_def(self, node: Node, path: str) -> Optional[ElementDef]:
        fields = self.mapping(node, path, ("name", "text", "params", "steps"), "element")
        if fields is None:
            return None
        self.note(path, node)
        anchor = getattr(node, "anchor", None)
        if anchor is None:
            self.error("XRL-P06", "element definition must carry an anchor", node, path)
            return None
        if "name" not in fields:
            self.error("XRL-P06", "element lacks 'name'", node, path)
            return None
        name = self.text(fields["name"][1], f"{path}.name", "element name")
        text = ""
        if "text" in fields:
            text = self.text(fields["text"][1], f"{path}.text", "element text")
        params = self.params(fields["params"][1], f"{path}.params") if "params" in fields else {}
        steps = None
        if "steps" in fields:
            steps = []
            for i, step in enumerate(self.sequence(fields["steps"][1], f"{path}.steps", "steps")):
                use = self.action_use(step, f"{path}.steps[{i}]")
                if use is not None:
                    steps.append(use)
            steps = tuple(steps)
        if name is None or text is None:
            return None
        return ElementDef(name, anchor, text, params, steps)

    def flow_entry(self, node: Node, path: str) -> Optional[FlowEntry]:
        fields = self.mapping(
            node, path, ("node", "action", "references_in", "references_out"), "flow entry"
        )
        if fields is None:
            return None
        self.note(path, node)
        for required in ("node", "action"):
            if required not in fields:
                self.error("XRL-P06", f"flow entry lacks {required!r}", node, path)
        if "node" not in fields or "action" not in fields:
            return None
        guid = self.guid_ref(fields["node"][1], f"{path}.node")
        action = self.action_use(fields["action"][1], f"{path}.action")
        refs = {}
        for key in ("references_in", "references_out"):
            seen: list[str] = []
            if key in fields:
                for i, item in enumerate(self.sequence(fields[key][1], f"{path}.{key}", key)):
                    ref = self.guid_ref(item, f"{path}.{key}[{i}]")
                    if ref is None:
                        continue
                    if ref in seen:
                        self.error("XRL-P06", f"duplicate entry in {key}", item, f"{path}.{key}[{i}]")
                        continue
                    if key == "references_in" and ref == guid:
                        self.error(
                            "XRL-P06", "node lists itself in references_in", item, f"{path}.{key}[{i}]"
                        )
                        continue
                    seen.append(ref)
            refs[key] = tuple(seen)
        if guid is None or action is None:
            return None
        return FlowEntry(guid, action, refs["references_in"], refs["references_out"])

    def document(self, root: Optional[Node]) -> Optional[XrlDocument]:
        if root is None:
            self.error("XRL-P06", "document is empty", None, "")
            return None
        if not isinstance(root, MappingNode):
            self.error("XRL-P06", "document must be a single top-level mapping", root, "")
            return None
        self.note("", root)
        sections: dict[str, tuple[Node, Node]] = {}
        for key_node, value_node in root.value:
            key = key_node.value if isinstance(key_node, ScalarNode) else None
            if key_node.tag == MERGE_TAG:
                key = "<<"
            if key not in SECTIONS:
                self.error("XRL-P05", f"unknown top-level key {key!r}", key_node, "")
                continue
            if key in sections:
                self.error("XRL-P08", f"duplicate section {key!r}", key_node, "")
                continue
            sections[key] = (key_node, value_node)
        for key in SECTIONS:
            if key not in sections:
                self.error("XRL-P06", f"missing section {key!r}", root, "")
        if self.diagnostics:
            return None

        # element mapping nodes first, so actions can recognise them by identity
        element_seq = self.sequence(sections["elements"][1], "elements", "elements")
        for el in element_seq:
            if isinstance(el, MappingNode) and getattr(el, "anchor", None):
                self.element_nodes[id(el)] = el.anchor

        nodes = [
            self.node_decl(n, f"nodes[{i}]")
            for i, n in enumerate(self.sequence(sections["nodes"][1], "nodes", "nodes"))
        ]
        elements = [self.element_def(e, f"elements[{i}]") for i, e in enumerate(element_seq)]
        start = self.boundary(sections["start"][1], "start")
        end = self.boundary(sections["end"][1], "end")
        flow = [
            self.flow_entry(f, f"flow[{i}]")
            for i, f in enumerate(self.sequence(sections["flow"][1], "flow", "flow"))
        ]
        if self.diagnostics:
            return None
        return XrlDocument(
            tuple(nodes), tuple(elements), start, end, tuple(flow), spans=dict(self.spans)
        )

    def boundary(self, node: Node, key: str) -> Optional[str]:
        if isinstance(node, SequenceNode):
            self.error("XRL-P06", f"exactly one {key} node is allowed", node, key)
            return None
        return self.guid_ref(node, key)


class _AnyKeys(tuple):
    def __contains__(self, item) -> bool:
        return True


_ANY = _AnyKeys()


def _normalize_guid(text: str) -> str:
    try:
        return parse_guid(text)
    except GuidError:
        return text


def parse_document(source: str) -> XrlDocument:
    """Parse XRL text.

    Anchors and aliases are resolved, every merge key is traced to the
    element definition it references, and all sections are bound to the
    model. Raises :class:`ParseError` carrying at least one located error.
    """
    try:
        root, loader = compose(source)
    except yaml.YAMLError as exc:
        raise ParseError([_yaml_error_diagnostic(exc)]) from None
    binder = _Binder(loader)
    doc = binder.document(root)
    if doc is None:
        raise ParseError(sorted(binder.diagnostics, key=Diagnostic.sort_key))
    return doc
