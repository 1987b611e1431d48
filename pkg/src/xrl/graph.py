"""Process graph: construction, traversal, composite expansion, and flowchart export."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Optional, Sequence

from .core.guid import derived_guid
from .core.model import ElementDef, ResolvedAction, XrlDocument
from .core.resolve import expand_composite, resolve_action


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class VertexInfo:
    name: str
    action: ResolvedAction


@dataclass(frozen=True)
class ProcessGraph:
    vertices: dict  # Guid -> VertexInfo, in flow order
    edges: frozenset  # of (Guid, Guid)
    start: str
    end: str

    def successors(self, v: str) -> list[str]:
        order = self.order()
        return sorted((b for a, b in self.edges if a == v), key=order.__getitem__)

    def predecessors(self, v: str) -> list[str]:
        order = self.order()
        return sorted((a for a, b in self.edges if b == v), key=order.__getitem__)

    def order(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def adjacency(self) -> dict[str, list[str]]:
        order = self.order()
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for a, b in sorted(self.edges, key=lambda e: (order[e[0]], order[e[1]])):
            adj[a].append(b)
        return adj


@dataclass(frozen=True)
class TraversalReport:
    reachable: frozenset
    co_reachable: frozenset
    cycles: list  # of tuples of vertices
    topological_order: Optional[tuple]


# -- generic algorithms over ordered adjacency maps --------------------------

def closure(adj: Mapping[Hashable, Iterable[Hashable]], roots: Iterable[Hashable]) -> set:
    """Vertices reachable from ``roots`` (roots included)."""
    seen = set()
    queue = deque(r for r in roots if r in adj)
    seen.update(queue)
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w in adj and w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def reverse(adj: Mapping[Hashable, Iterable[Hashable]]) -> dict:
    rev: dict = {v: [] for v in adj}
    for v, ws in adj.items():
        for w in ws:
            if w in rev:
                rev[w].append(v)
    return rev


def simple_cycles(adj: Mapping[Hashable, Sequence[Hashable]]) -> list[tuple]:
    """Every elementary cycle once, rotated to begin at its earliest vertex.

    Vertex order is the iteration order of ``adj``. Cycles are found by
    rooting a DFS at each vertex and only visiting later vertices, so no
    rotation is produced twice.
    """
    index = {v: i for i, v in enumerate(adj)}
    cycles: list[tuple] = []
    for root in adj:
        lo = index[root]
        path = [root]
        on_path = {root}
        stack = [iter(adj[root])]
        while stack:
            for w in stack[-1]:
                if w not in index or index[w] < lo:
                    continue
                if w == root:
                    cycles.append(tuple(path))
                elif w not in on_path:
                    path.append(w)
                    on_path.add(w)
                    stack.append(iter(adj[w]))
                    break
            else:
                stack.pop()
                on_path.discard(path.pop())
    cycles.sort(key=lambda c: (len(c), [index[v] for v in c]))
    return cycles


def topological_order(adj: Mapping[Hashable, Sequence[Hashable]]) -> Optional[tuple]:
    """Kahn's algorithm, ties broken by vertex order. ``None`` when cyclic."""
    index = {v: i for i, v in enumerate(adj)}
    indeg = {v: 0 for v in adj}
    for ws in adj.values():
        for w in ws:
            if w in indeg:
                indeg[w] += 1
    ready = sorted((v for v, d in indeg.items() if d == 0), key=index.__getitem__)
    out = []
    while ready:
        v = ready.pop(0)
        out.append(v)
        for w in adj[v]:
            if w in indeg:
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
                    ready.sort(key=index.__getitem__)
    return tuple(out) if len(out) == len(adj) else None


# -- process graphs ----------------------------------------------------------

def build_graph(doc: XrlDocument) -> ProcessGraph:
    """One vertex per flow entry; edge (A, B) iff B is in A's references_out."""
    names = {n.id: n.name for n in doc.nodes}
    vertices = {}
    for entry in doc.flow:
        if entry.node in vertices:
            raise GraphError(f"node {entry.node} appears in flow more than once")
        vertices[entry.node] = VertexInfo(
            names.get(entry.node, entry.node), resolve_action(entry.action, doc.elements)
        )
    edges = set()
    for entry in doc.flow:
        for target in entry.references_out:
            if target not in vertices:
                raise GraphError(f"edge to node {target} which has no flow entry")
            edges.add((entry.node, target))
    for key, value in (("start", doc.start), ("end", doc.end)):
        if value not in vertices:
            raise GraphError(f"{key} node {value} has no flow entry")
    return ProcessGraph(vertices, frozenset(edges), doc.start, doc.end)


def analyze(g: ProcessGraph) -> TraversalReport:
    adj = g.adjacency()
    cycles = simple_cycles(adj)
    return TraversalReport(
        reachable=frozenset(closure(adj, [g.start])),
        co_reachable=frozenset(closure(reverse(adj), [g.end])),
        cycles=cycles,
        topological_order=None if cycles else topological_order(adj),
    )


def _composite_named(name: str, elements: Sequence[ElementDef]) -> Optional[ElementDef]:
    for el in elements:
        if el.name == name and el.is_composite:
            return el
    return None


def expand_composites_in_graph(g: ProcessGraph, elements: Sequence[ElementDef]) -> ProcessGraph:
    """Replace each composite vertex by the linear chain of its basic steps.

    Chain vertices get GUIDs derived from (composite vertex GUID, step index)
    and are named ``<vertex>.<n>``. Incoming edges attach to the chain head,
    outgoing edges leave from its tail. A zero-step composite is bypassed.
    """
    chains: dict[str, list[str]] = {}
    vertices: dict[str, VertexInfo] = {}
    for v, info in g.vertices.items():
        el = _composite_named(info.action.element_name, elements)
        if el is None:
            vertices[v] = info
            chains[v] = [v]
            continue
        steps = expand_composite(el, elements, info.action.params)
        chain = [derived_guid(v, i) for i in range(len(steps))]
        for i, (guid, action) in enumerate(zip(chain, steps)):
            vertices[guid] = VertexInfo(f"{info.name}.{i + 1}", action)
        chains[v] = chain
        if not chain and v in (g.start, g.end):
            raise GraphError(f"empty composite {el.name!r} cannot be the start or end vertex")

    edges = set()
    for chain in chains.values():
        edges.update(zip(chain, chain[1:]))

    def heads(v: str, seen: frozenset = frozenset()) -> list[str]:
        if chains[v]:
            return [chains[v][0]]
        seen = seen | {v}
        return [h for (a, b) in g.edges if a == v and b not in seen for h in heads(b, seen)]

    def tails(v: str, seen: frozenset = frozenset()) -> list[str]:
        if chains[v]:
            return [chains[v][-1]]
        seen = seen | {v}
        return [t for (a, b) in g.edges if b == v and a not in seen for t in tails(a, seen)]

    for a, b in g.edges:
        if not chains[a] or not chains[b]:
            continue
        edges.add((chains[a][-1], chains[b][0]))
    for v, chain in chains.items():
        if not chain:
            for t in tails(v):
                for h in heads(v):
                    edges.add((t, h))
    return ProcessGraph(vertices, frozenset(edges), chains[g.start][0], chains[g.end][-1])


def _edge_order(g: ProcessGraph) -> list[tuple[str, str]]:
    order = g.order()
    return sorted(g.edges, key=lambda e: (order[e[0]], order[e[1]]))


def _dot_quote(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{escaped}"'


def export_dot(g: ProcessGraph) -> str:
    lines = ["digraph process {", "  rankdir=TB;", "  node [shape=box];"]
    for v, info in g.vertices.items():
        attrs = [f"label={_dot_quote(info.name + chr(10) + info.action.element_name)}"]
        if v == g.start:
            attrs.append("shape=ellipse")
            attrs.append("style=bold")
        if v == g.end:
            if v != g.start:
                attrs.append("shape=ellipse")
            attrs.append("peripheries=2")
        lines.append(f"  {_dot_quote(v)} [{', '.join(attrs)}];")
    for a, b in _edge_order(g):
        lines.append(f"  {_dot_quote(a)} -> {_dot_quote(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _mermaid_label(text: str) -> str:
    return text.replace('"', "#quot;")


def export_mermaid(g: ProcessGraph) -> str:
    ids = {v: f"n{i}" for i, v in enumerate(g.vertices)}
    lines = ["flowchart TD"]
    for v, info in g.vertices.items():
        label = f'"{_mermaid_label(info.name)}<br/>{_mermaid_label(info.action.element_name)}"'
        if v == g.start and v == g.end:
            shape = f"((({label})))"
        elif v == g.start:
            shape = f"([{label}])"
        elif v == g.end:
            shape = f"(({label}))"
        else:
            shape = f"[{label}]"
        lines.append(f"    {ids[v]}{shape}")
    for a, b in _edge_order(g):
        lines.append(f"    {ids[a]} --> {ids[b]}")
    lines.append("    classDef startNode stroke-width:3px")
    lines.append("    classDef endNode stroke-width:3px,stroke-dasharray:4")
    lines.append(f"    class {ids[g.start]} startNode")
    lines.append(f"    class {ids[g.end]} endNode")
    return "\n".join(lines) + "\n"
