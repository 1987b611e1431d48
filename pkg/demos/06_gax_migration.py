"""Move a process to the XML exchange format and back, and compare sizes."""

from pathlib import Path

from xrl.core import format_canonical
from xrl.interop import export_gax, import_gax, semantic_equal
from xrl.sim import load_scenario, simulate

CORPUS = Path(__file__).resolve().parents[1] / "tests" / "corpus"

doc, env0, _ = load_scenario("p1_search_email")
xml = export_gax(doc)
yaml_text = format_canonical(doc)
print(f"P1 as XRL: {len(yaml_text)} characters; as GAX: {len(xml)} characters ({len(xml) / len(yaml_text):.2f}x)")
print(f"GAX round trip preserves the process: {semantic_equal(import_gax(xml), doc)}")

hand_written = import_gax((CORPUS / "p1_search_email.gax.xml").read_text(encoding="utf-8"))
same = simulate(hand_written, env0).to_json() == simulate(doc, env0).to_json()
print(f"A GAX file written by hand runs to the same trace: {same}")

print("\nFirst lines of the export:")
print("\n".join(xml.splitlines()[:8]))
