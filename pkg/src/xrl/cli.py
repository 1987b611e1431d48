"""``xrl`` command-line entry point.

Exit codes: 0 success, 1 validation errors, 2 parse errors, 3 simulation
fault or budget exhaustion, 4 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .core.diagnostics import DiagnosticError, format_json, format_text, has_errors
from .core.formatter import format_canonical
from .core.parser import parse_document
from .graph import build_graph, expand_composites_in_graph, export_dot, export_mermaid
from .interop import export_gax, import_gax
from .sim import MissingHandlerError, StepBudget, UnknownScenarioError, VirtualEnv, simulate
from .sim.scenarios import scenario_data
from .validate import lint_readability, validate_document

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARSE = 2
EXIT_SIM = 3
EXIT_USAGE = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit_diagnostics(args, diagnostics, out) -> None:
    if args.json:
        out.write(format_json(diagnostics, args.path))
    elif diagnostics:
        out.write(format_text(diagnostics, args.path))


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _load(args, out):
    """Parse and validate; returns (source, doc) or an exit code."""
    source = _read(args.path)
    try:
        doc = parse_document(source)
    except DiagnosticError as exc:
        _emit_diagnostics(args, exc.diagnostics, out)
        return EXIT_PARSE
    return source, doc


def _load_valid(args, out):
    loaded = _load(args, out)
    if isinstance(loaded, int):
        return loaded
    diagnostics = validate_document(loaded[1])
    if has_errors(diagnostics):
        _emit_diagnostics(args, diagnostics, out)
        return EXIT_INVALID
    return loaded


def cmd_validate(args, out) -> int:
    loaded = _load(args, out)
    if isinstance(loaded, int):
        return loaded
    diagnostics = validate_document(loaded[1])
    _emit_diagnostics(args, diagnostics, out)
    return EXIT_INVALID if has_errors(diagnostics) else EXIT_OK


def cmd_lint(args, out) -> int:
    loaded = _load(args, out)
    if isinstance(loaded, int):
        return loaded
    report, diagnostics = lint_readability(*loaded)
    if args.json:
        payload = {"report": report.to_dict(), "diagnostics": [d.to_dict() for d in diagnostics]}
        out.write(json.dumps(payload, indent=2) + "\n")
        return EXIT_OK
    for key, value in report.to_dict().items():
        if isinstance(value, float):
            value = f"{value:.3f}"
        out.write(f"{key}: {value}\n")
    out.write(format_text(diagnostics, args.path))
    return EXIT_OK


def cmd_fmt(args, out) -> int:
    loaded = _load(args, out)
    if isinstance(loaded, int):
        return loaded
    text = format_canonical(loaded[1])
    if args.write:
        Path(args.path).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


def cmd_graph(args, out) -> int:
    loaded = _load_valid(args, out)
    if isinstance(loaded, int):
        return loaded
    doc = loaded[1]
    g = build_graph(doc)
    if args.expand:
        g = expand_composites_in_graph(g, doc.elements)
    out.write(export_dot(g) if args.format == "dot" else export_mermaid(g))
    return EXIT_OK


def cmd_run(args, out) -> int:
    env0 = VirtualEnv()
    if args.scenario_env:
        try:
            env0 = VirtualEnv.from_dict(scenario_data(args.scenario_env)["initial"])
        except UnknownScenarioError:
            raise UsageError(f"unknown scenario {args.scenario_env!r}") from None
    loaded = _load_valid(args, out)
    if isinstance(loaded, int):
        return loaded
    try:
        trace = simulate(loaded[1], env0, budget=StepBudget(args.max_steps))
    except MissingHandlerError as exc:
        sys.stderr.write(f"xrl: {exc}\n")
        return EXIT_SIM
    out.write(trace.to_json() if args.trace == "json" else trace.to_text())
    return EXIT_OK if trace.completed else EXIT_SIM


def cmd_convert(args, out) -> int:
    if args.to == "gax":
        loaded = _load_valid(args, out)
        if isinstance(loaded, int):
            return loaded
        out.write(export_gax(loaded[1]))
        return EXIT_OK
    try:
        doc = import_gax(_read(args.path))
    except DiagnosticError as exc:
        _emit_diagnostics(args, exc.diagnostics, out)
        return EXIT_PARSE
    out.write(format_canonical(doc))
    return EXIT_OK


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit diagnostics as JSON")

    parser = _Parser(prog="xrl", description="Toolchain for XRL process documents.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="check a document against all rules")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("lint", parents=[common], help="readability metrics and warnings")
    p.add_argument("path")
    p.set_defaults(func=cmd_lint)

    p = sub.add_parser("fmt", parents=[common], help="print the canonical form")
    p.add_argument("path")
    p.add_argument("--write", action="store_true", help="rewrite the file in place")
    p.set_defaults(func=cmd_fmt)

    p = sub.add_parser("graph", parents=[common], help="export the process flowchart")
    p.add_argument("path")
    p.add_argument("--format", choices=("dot", "mermaid"), default="dot")
    p.add_argument("--expand", action="store_true", help="inline composite elements")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("run", parents=[common], help="dry-run against the virtual desktop")
    p.add_argument("path")
    p.add_argument("--scenario-env", metavar="NAME", help="start from a bundled scenario's environment")
    p.add_argument("--max-steps", type=_positive, default=StepBudget().max_steps)
    p.add_argument("--trace", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("convert", parents=[common], help="convert between XRL and GAX")
    p.add_argument("path")
    p.add_argument("--to", choices=("gax", "xrl"), required=True)
    p.set_defaults(func=cmd_convert)
    return parser


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"xrl: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
