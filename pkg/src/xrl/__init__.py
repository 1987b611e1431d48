"""XRL: a human-readable, YAML-based language for robotic process automation.

Parse documents with :func:`parse_document`, check them with
:func:`validate_document`, and dry-run them with :func:`simulate`.
"""

from .core import (
    ActionUse,
    Diagnostic,
    ElementDef,
    FlowEntry,
    NodeDecl,
    ParseError,
    ResolvedAction,
    XrlDocument,
    expand_composite,
    format_canonical,
    parse_document,
    parse_guid,
    resolve_action,
    structurally_equal,
)
from .graph import (
    ProcessGraph,
    analyze,
    build_graph,
    expand_composites_in_graph,
    export_dot,
    export_mermaid,
)
from .interop import export_gax, import_gax, semantic_equal
from .sim import VirtualEnv, builtin_handlers, load_scenario, simulate
from .validate import LintReport, lint_readability, validate_document

__version__ = "0.1.0"

__all__ = [
    "ActionUse",
    "Diagnostic",
    "ElementDef",
    "FlowEntry",
    "LintReport",
    "NodeDecl",
    "ParseError",
    "ProcessGraph",
    "ResolvedAction",
    "VirtualEnv",
    "XrlDocument",
    "analyze",
    "build_graph",
    "builtin_handlers",
    "expand_composite",
    "expand_composites_in_graph",
    "export_dot",
    "export_gax",
    "export_mermaid",
    "format_canonical",
    "import_gax",
    "lint_readability",
    "load_scenario",
    "parse_document",
    "parse_guid",
    "resolve_action",
    "semantic_equal",
    "simulate",
    "structurally_equal",
    "validate_document",
]
