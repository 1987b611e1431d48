"""Coded, located findings and the registered rule table."""

from __future__ import annotations

import enum
import json
import os
import sys
from dataclasses import dataclass
from typing import Iterable, Sequence


class Severity(str, enum.Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


@dataclass(frozen=True)
class Rule:
    code: str
    title: str
    default_severity: Severity


_E, _W = Severity.ERROR, Severity.WARNING

RULES: dict[str, Rule] = {
    r.code: r
    for r in [
        # parsing
        Rule("XRL-P01", "malformed YAML syntax", _E),
        Rule("XRL-P02", "alias to undefined anchor", _E),
        Rule("XRL-P03", "duplicate anchor", _E),
        Rule("XRL-P04", "merge key applied to a non-mapping", _E),
        Rule("XRL-P05", "unknown top-level key", _E),
        Rule("XRL-P06", "malformed document structure", _E),
        Rule("XRL-P07", "unsupported parameter value", _E),
        Rule("XRL-P08", "duplicate mapping key", _E),
        # GAX import
        Rule("XRL-G01", "malformed XML", _E),
        Rule("XRL-G02", "unresolved reference", _E),
        Rule("XRL-G03", "invalid GUID", _E),
        Rule("XRL-G04", "malformed GAX structure", _E),
        # semantic validation
        Rule("XRL001", "invalid GUID", _E),
        Rule("XRL002", "duplicate declaration", _E),
        Rule("XRL003", "start or end is not a declared node", _E),
        Rule("XRL004", "reference to undeclared node", _E),
        Rule("XRL005", "node appears in flow more than once", _E),
        Rule("XRL006", "asymmetric references", _E),
        Rule("XRL007", "start has predecessors or end has successors", _E),
        Rule("XRL008", "node unreachable from start", _E),
        Rule("XRL009", "end unreachable from node", _E),
        Rule("XRL010", "action references undefined element", _E),
        Rule("XRL011", "override key not declared by element", _E),
        Rule("XRL012", "required parameter unresolved", _E),
        Rule("XRL013", "cyclic composite element", _E),
        Rule("XRL014", "placeholder names undeclared parameter", _E),
        # warnings and lint
        Rule("XRL101", "cycle in process flow", _W),
        Rule("XRL102", "duplicated GUID literal", _W),
        Rule("XRL103", "low alias reuse", _W),
        Rule("XRL104", "deep nesting", _W),
        Rule("XRL105", "declared node absent from flow", _W),
    ]
}


@dataclass(frozen=True, order=True)
class Location:
    """1-based source position plus the document path of the offending value."""

    line: int = 1
    column: int = 1
    path: str = ""


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    location: Location = Location()

    def __post_init__(self) -> None:
        if self.code not in RULES:
            raise ValueError(f"unregistered diagnostic code {self.code!r}")

    @classmethod
    def of(cls, code: str, message: str, location: Location = Location()) -> Diagnostic:
        return cls(RULES[code].default_severity, code, message, location)

    def sort_key(self) -> tuple:
        return (self.location, self.code, self.message)

    def to_dict(self) -> dict:
        return {
            "severity": self.severity.value,
            "code": self.code,
            "message": self.message,
            "line": self.location.line,
            "column": self.location.column,
            "path": self.location.path,
        }


def has_errors(diagnostics: Iterable[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)


def sort_diagnostics(diagnostics: Iterable[Diagnostic]) -> list[Diagnostic]:
    return sorted(set(diagnostics), key=Diagnostic.sort_key)


_COLORS = {Severity.ERROR: "\x1b[31m", Severity.WARNING: "\x1b[33m", Severity.INFO: "\x1b[36m"}


def _use_color(stream) -> bool:
    if os.environ.get("XRL_NO_COLOR"):
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def format_text(
    diagnostics: Sequence[Diagnostic], filename: str = "<string>", color: bool | None = None
) -> str:
    """Render one ``severity code file:line:col message`` line per diagnostic."""
    if color is None:
        color = _use_color(sys.stdout)
    lines = []
    for d in diagnostics:
        sev = d.severity.value
        if color:
            sev = f"{_COLORS[d.severity]}{sev}\x1b[0m"
        loc = d.location
        lines.append(f"{sev} {d.code} {filename}:{loc.line}:{loc.column} {d.message}")
    return "".join(line + "\n" for line in lines)


def format_json(diagnostics: Sequence[Diagnostic], filename: str | None = None) -> str:
    rows = []
    for d in diagnostics:
        row = d.to_dict()
        if filename is not None:
            row["file"] = filename
        rows.append(row)
    return json.dumps(rows, indent=2, ensure_ascii=False) + "\n"


class DiagnosticError(Exception):
    """Raised when an operation fails with one or more error diagnostics."""

    def __init__(self, diagnostics: Sequence[Diagnostic]):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else None
        summary = f"{first.code}: {first.message}" if first else "failed"
        if len(self.diagnostics) > 1:
            summary += f" (+{len(self.diagnostics) - 1} more)"
        super().__init__(summary)
