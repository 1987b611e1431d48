"""Parse a process document, then break it on purpose and read the diagnostics."""

from dataclasses import replace
from pathlib import Path

from xrl.core import ParseError, format_text, parse_document
from xrl.validate import validate_document

CORPUS = Path(__file__).resolve().parents[1] / "tests" / "corpus"

source = (CORPUS / "s1_linear.xrl.yaml").read_text(encoding="utf-8")
doc = parse_document(source)

print("Nodes declared in the identifiers section:")
for node in doc.nodes:
    print(f"  {node.name:<14} {node.id}  (anchor &{node.anchor})")

print("\nThe click step merges the CLICK element and overrides one parameter:")
print(f"  {doc.flow[1].action}")

print(f"\nA clean document produces {len(validate_document(doc))} findings.")

# Drop the forward reference from the first node but keep the backward one.
broken = replace(doc, flow=(replace(doc.flow[0], references_out=()),) + doc.flow[1:])
print("\nAfter removing launch -> click_submit from references_out only:")
print(format_text(validate_document(broken), "s1_linear.xrl.yaml", color=False), end="")

print("\nA dangling alias is caught while parsing, at the alias itself:")
try:
    parse_document(source.replace("[*NODE_2_ID]", "[*NODE_9]"))
except ParseError as exc:
    print(format_text(exc.diagnostics, "s1_linear.xrl.yaml", color=False), end="")
