"""Readability: a document full of repeated GUID literals, before and after formatting."""

from pathlib import Path

from xrl.core import format_canonical, parse_document
from xrl.validate import lint_readability

CORPUS = Path(__file__).resolve().parents[1] / "tests" / "corpus"

source = (CORPUS / "literal_guids.xrl.yaml").read_text(encoding="utf-8")
doc = parse_document(source)
report, warnings = lint_readability(source, doc)
print("As written:")
print(f"  {report.duplicate_literal_guids} repeated GUID literals, alias reuse ratio {report.alias_reuse_ratio:.2f}")
print(f"  {len(warnings)} readability warnings")

canonical = format_canonical(doc)
report, warnings = lint_readability(canonical, parse_document(canonical))
print("\nCanonical form:")
print(f"  {report.duplicate_literal_guids} repeated GUID literals, alias reuse ratio {report.alias_reuse_ratio:.2f}")
print(f"  {len(warnings)} readability warnings\n")
print(canonical)

again = format_canonical(parse_document(canonical))
print(f"Formatting the canonical text again changes nothing: {again == canonical}")
