"""Document model, parser, resolver and canonical formatter."""

from .diagnostics import (
    RULES,
    Diagnostic,
    DiagnosticError,
    Location,
    Rule,
    Severity,
    format_json,
    format_text,
    has_errors,
    sort_diagnostics,
)
from .formatter import canonicalize_anchors, format_canonical, structurally_equal
from .guid import Guid, GuidError, derived_guid, is_guid, parse_guid
from .model import (
    ActionUse,
    ElementDef,
    FlowEntry,
    NodeDecl,
    ParamMap,
    ResolvedAction,
    XrlDocument,
)
from .parser import ParseError, parse_document
from .resolve import ResolutionError, expand_composite, resolve_action

__all__ = [
    "RULES",
    "ActionUse",
    "Diagnostic",
    "DiagnosticError",
    "ElementDef",
    "FlowEntry",
    "Guid",
    "GuidError",
    "Location",
    "NodeDecl",
    "ParamMap",
    "ParseError",
    "ResolutionError",
    "ResolvedAction",
    "Rule",
    "Severity",
    "XrlDocument",
    "canonicalize_anchors",
    "derived_guid",
    "expand_composite",
    "format_canonical",
    "format_json",
    "format_text",
    "has_errors",
    "is_guid",
    "parse_document",
    "parse_guid",
    "resolve_action",
    "sort_diagnostics",
    "structurally_equal",
]
