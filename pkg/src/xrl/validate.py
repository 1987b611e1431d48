"""Semantic validation and readability linting."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from yaml.nodes import MappingNode, Node, ScalarNode, SequenceNode

from .core.diagnostics import Diagnostic, Location, sort_diagnostics
from .core.guid import is_guid, parse_guid
from .core.model import ActionUse, XrlDocument
from .core.parser import compose
from .core.resolve import (
    ResolutionError,
    composite_cycles,
    placeholder_name,
    resolve_action,
)
from .graph import closure, reverse, simple_cycles

ALIAS_REUSE_MIN = 0.5
ALIAS_REUSE_MIN_BLOCKS = 3
MAX_NESTING = 6


def validate_document(doc: XrlDocument) -> list[Diagnostic]:
    """Run every rule and return findings sorted by (location, code)."""
    out: list[Diagnostic] = []

    def report(code: str, message: str, path: str) -> None:
        out.append(Diagnostic.of(code, message, doc.locate(path)))

    declared = _check_declarations(doc, report)
    _check_boundaries(doc, declared, report)
    entry_index = _check_flow_membership(doc, declared, report)
    _check_symmetry(doc, entry_index, report)
    _check_reachability(doc, entry_index, report)
    _check_actions(doc, report)
    _check_elements(doc, report)
    return sort_diagnostics(out)


def _check_declarations(doc: XrlDocument, report) -> set[str]:
    seen_names: dict[str, int] = {}
    seen_ids: dict[str, int] = {}
    seen_anchors: dict[str, str] = {}
    for i, n in enumerate(doc.nodes):
        if not is_guid(n.id):
            report("XRL001", f"node {n.name!r} has invalid GUID {n.id!r}", f"nodes[{i}].id")
        if n.name in seen_names:
            report("XRL002", f"duplicate node name {n.name!r}", f"nodes[{i}].name")
        seen_names.setdefault(n.name, i)
        if n.id in seen_ids:
            report("XRL002", f"duplicate node id {n.id}", f"nodes[{i}].id")
        seen_ids.setdefault(n.id, i)
        if n.anchor:
            if n.anchor in seen_anchors:
                report("XRL002", f"duplicate anchor {n.anchor!r}", f"nodes[{i}].id")
            seen_anchors.setdefault(n.anchor, f"nodes[{i}]")
    element_names: set[str] = set()
    for i, el in enumerate(doc.elements):
        if el.name in element_names:
            report("XRL002", f"duplicate element name {el.name!r}", f"elements[{i}].name")
        element_names.add(el.name)
        if el.anchor in seen_anchors:
            report("XRL002", f"duplicate anchor {el.anchor!r}", f"elements[{i}]")
        seen_anchors.setdefault(el.anchor, f"elements[{i}]")
    return set(seen_ids)


def _check_boundaries(doc: XrlDocument, declared: set[str], report) -> None:
    for key in ("start", "end"):
        value = getattr(doc, key)
        if value not in declared:
            report("XRL003", f"{key} {value!r} is not a declared node", key)
        elif doc.entry_for(value) is None:
            report("XRL003", f"{key} node has no flow entry", key)


def _check_flow_membership(doc: XrlDocument, declared: set[str], report) -> dict[str, int]:
    entry_index: dict[str, int] = {}
    for i, e in enumerate(doc.flow):
        if e.node not in declared:
            report("XRL004", f"flow entry for undeclared node {e.node!r}", f"flow[{i}].node")
        if e.node in entry_index:
            report("XRL005", f"node {e.node} appears in flow more than once", f"flow[{i}].node")
        else:
            entry_index[e.node] = i
        for key in ("references_in", "references_out"):
            for k, ref in enumerate(getattr(e, key)):
                if ref not in declared:
                    report("XRL004", f"reference to undeclared node {ref!r}", f"flow[{i}].{key}[{k}]")
    names = {n.id: n.name for n in doc.nodes}
    for i, n in enumerate(doc.nodes):
        if n.id not in entry_index and is_guid(n.id):
            report("XRL105", f"node {names[n.id]!r} is declared but absent from flow", f"nodes[{i}]")
    return entry_index


def _check_symmetry(doc: XrlDocument, entry_index: dict[str, int], report) -> None:
    for i, e in enumerate(doc.flow):
        if entry_index.get(e.node) != i:
            continue
        for k, b in enumerate(e.references_out):
            j = entry_index.get(b)
            if j is not None and e.node not in doc.flow[j].references_in:
                report(
                    "XRL006",
                    f"{b} is a successor of {e.node} but does not list it in references_in",
                    f"flow[{i}].references_out[{k}]",
                )
        for k, b in enumerate(e.references_in):
            j = entry_index.get(b)
            if j is not None and e.node not in doc.flow[j].references_out:
                report(
                    "XRL006",
                    f"{b} is a predecessor of {e.node} but does not list it in references_out",
                    f"flow[{i}].references_in[{k}]",
                )
    start_i = entry_index.get(doc.start)
    if start_i is not None and doc.flow[start_i].references_in:
        report("XRL007", "start node has predecessors", f"flow[{start_i}].references_in")
    end_i = entry_index.get(doc.end)
    if end_i is not None and doc.flow[end_i].references_out:
        report("XRL007", "end node has successors", f"flow[{end_i}].references_out")


def _flow_adjacency(doc: XrlDocument, entry_index: dict[str, int]) -> dict[str, list[str]]:
    """Edges declared from either end; asymmetry itself is XRL006's concern."""
    adj: dict[str, list[str]] = {node: [] for node in entry_index}
    for node, i in entry_index.items():
        entry = doc.flow[i]
        for b in entry.references_out:
            if b in entry_index and b not in adj[node]:
                adj[node].append(b)
        for a in entry.references_in:
            if a in entry_index and node not in adj[a]:
                adj[a].append(node)
    return adj


def _check_reachability(doc: XrlDocument, entry_index: dict[str, int], report) -> None:
    adj = _flow_adjacency(doc, entry_index)
    if doc.start in adj:
        reached = closure(adj, [doc.start])
        for node, i in entry_index.items():
            if node not in reached:
                report("XRL008", f"node {node} is unreachable from start", f"flow[{i}].node")
    if doc.end in adj:
        reaching = closure(reverse(adj), [doc.end])
        for node, i in entry_index.items():
            if node not in reaching:
                report("XRL009", f"end is unreachable from node {node}", f"flow[{i}].node")
    for cycle in simple_cycles(adj):
        i = entry_index[cycle[0]]
        report("XRL101", f"cycle through {len(cycle)} node(s)", f"flow[{i}].node")


def _use_path(base: str, exc: ResolutionError, use: ActionUse, elements) -> str:
    if exc.code == "XRL010":
        return f"{base}.<<"
    if exc.code == "XRL011":
        for key in use.overrides:
            if not any(el.anchor == use.element and key in el.params for el in elements):
                return f"{base}.params.{key}"
    return base


def _check_actions(doc: XrlDocument, report) -> None:
    for i, e in enumerate(doc.flow):
        try:
            resolve_action(e.action, doc.elements)
        except ResolutionError as exc:
            base = f"flow[{i}].action"
            report(exc.code, str(exc), _use_path(base, exc, e.action, doc.elements))


def _check_elements(doc: XrlDocument, report) -> None:
    by_anchor = {el.anchor: el for el in doc.elements}
    for i, el in enumerate(doc.elements):
        for k, step in enumerate(el.steps or ()):
            base = f"elements[{i}].steps[{k}]"
            target = by_anchor.get(step.element)
            if target is None:
                report("XRL010", f"step references undefined element {step.element!r}", f"{base}.<<")
                continue
            for key, value in step.overrides.items():
                if key not in target.params:
                    report(
                        "XRL011",
                        f"element {target.name!r} does not declare parameter {key!r}",
                        f"{base}.params.{key}",
                    )
                name = placeholder_name(value)
                if name is not None and name not in el.params:
                    report(
                        "XRL014",
                        f"placeholder {value!r} names a parameter {el.name!r} does not declare",
                        f"{base}.params.{key}",
                    )
            for key, default in target.params.items():
                if default is None and step.overrides.get(key) is None:
                    report(
                        "XRL012",
                        f"required parameter {key} unsupplied in step of {el.name!r}",
                        base,
                    )
    index = {el.anchor: i for i, el in enumerate(doc.elements)}
    for cycle in composite_cycles(doc.elements):
        report("XRL013", f"cyclic composite reference {' -> '.join(cycle + cycle[:1])}", f"elements[{index[cycle[0]]}]")


# -- readability lint ---------------------------------------------------------

@dataclass(frozen=True)
class LintReport:
    node_count: int
    element_count: int
    line_count: int
    alias_reuse_ratio: float
    max_nesting_depth: int
    duplicate_literal_guids: int
    verbosity_chars: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _walk(root: Node):
    """Yield (node, depth) in document order, visiting each collection once."""
    seen: set[int] = set()
    stack = [(root, 1)]
    while stack:
        node, depth = stack.pop()
        if isinstance(node, ScalarNode):
            yield node, depth
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        yield node, depth
        if isinstance(node, MappingNode):
            children = [c for pair in node.value for c in pair]
        else:
            children = list(node.value)
        stack.extend((c, depth + 1) for c in reversed(children))


def lint_readability(source: str, doc: XrlDocument) -> tuple[LintReport, list[Diagnostic]]:
    """Readability metrics for ``source`` plus the warnings they trigger."""
    root, loader = compose(source)
    diagnostics: list[Diagnostic] = []
    literal_counts: Counter = Counter()
    duplicates = 0
    depth_max, depth_node = 0, root
    for node, depth in _walk(root):
        if isinstance(node, (MappingNode, SequenceNode)):
            if depth > depth_max:
                depth_max, depth_node = depth, node
            continue
        if getattr(node, "alias", None) is not None or not is_guid(node.value):
            continue
        guid = parse_guid(node.value)
        literal_counts[guid] += 1
        if literal_counts[guid] > 1:
            duplicates += 1
            mark = node.start_mark
            diagnostics.append(
                Diagnostic.of(
                    "XRL102",
                    f"GUID {guid} is written out again; reference it with an alias",
                    Location(mark.line + 1, mark.column + 1),
                )
            )
    aliases = len(loader.alias_sites)
    sites = aliases + duplicates
    ratio = aliases / sites if sites else 1.0
    blocks = len(doc.nodes) + len(doc.elements)
    if blocks >= ALIAS_REUSE_MIN_BLOCKS and ratio < ALIAS_REUSE_MIN:
        diagnostics.append(
            Diagnostic.of(
                "XRL103",
                f"only {ratio:.0%} of reused values are aliases",
                Location(1, 1),
            )
        )
    if depth_max > MAX_NESTING:
        mark = depth_node.start_mark
        diagnostics.append(
            Diagnostic.of(
                "XRL104",
                f"nesting depth {depth_max} exceeds {MAX_NESTING}",
                Location(mark.line + 1, mark.column + 1),
            )
        )
    lines = source.count("\n") + (1 if source and not source.endswith("\n") else 0)
    report = LintReport(
        node_count=len(doc.nodes),
        element_count=len(doc.elements),
        line_count=lines,
        alias_reuse_ratio=ratio,
        max_nesting_depth=depth_max,
        duplicate_literal_guids=duplicates,
        verbosity_chars=len(source),
    )
    return report, sort_diagnostics(diagnostics)
