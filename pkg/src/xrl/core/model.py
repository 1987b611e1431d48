"""In-memory document model.

All values are treated as immutable once built; ``dict`` fields are never
mutated in place by this package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .diagnostics import Location

Scalar = Union[str, int, float, bool, None]
ParamMap = dict  # ordered mapping of parameter name -> Scalar

PLACEHOLDER_PREFIX = "$param:"


@dataclass(frozen=True)
class NodeDecl:
    name: str
    id: str
    anchor: str


@dataclass(frozen=True)
class ActionUse:
    element: str  # anchor of the referenced ElementDef
    overrides: ParamMap = field(default_factory=dict)


@dataclass(frozen=True)
class ElementDef:
    name: str
    anchor: str
    text: str
    params: ParamMap = field(default_factory=dict)
    steps: Optional[tuple[ActionUse, ...]] = None

    @property
    def is_composite(self) -> bool:
        return self.steps is not None


@dataclass(frozen=True)
class ResolvedAction:
    element_name: str
    text: str
    params: ParamMap


@dataclass(frozen=True)
class FlowEntry:
    node: str
    action: ActionUse
    references_in: tuple[str, ...] = ()
    references_out: tuple[str, ...] = ()


@dataclass(frozen=True)
class XrlDocument:
    nodes: tuple[NodeDecl, ...]
    elements: tuple[ElementDef, ...]
    start: str
    end: str
    flow: tuple[FlowEntry, ...]
    # document path -> source position; not part of equality
    spans: dict = field(default_factory=dict, compare=False, repr=False)

    def element_by_anchor(self, anchor: str) -> Optional[ElementDef]:
        for el in self.elements:
            if el.anchor == anchor:
                return el
        return None

    def node_by_id(self, guid: str) -> Optional[NodeDecl]:
        for n in self.nodes:
            if n.id == guid:
                return n
        return None

    def entry_for(self, guid: str) -> Optional[FlowEntry]:
        for e in self.flow:
            if e.node == guid:
                return e
        return None

    def locate(self, path: str) -> Location:
        """Source location of ``path``, falling back to the nearest enclosing value."""
        probe = path
        while True:
            if probe in self.spans:
                line, col = self.spans[probe]
                return Location(line, col, path)
            if not probe:
                return Location(1, 1, path)
            cut = max(probe.rfind("."), probe.rfind("["))
            probe = probe[:cut] if cut > 0 else ""
