"""Turn the branching fixture into a graph, analyze it, and render both flowchart formats."""

from pathlib import Path

from xrl.core import parse_document
from xrl.graph import analyze, build_graph, export_dot, export_mermaid

CORPUS = Path(__file__).resolve().parents[1] / "tests" / "corpus"

for name in ("b1_branching", "loop_retry"):
    doc = parse_document((CORPUS / f"{name}.xrl.yaml").read_text(encoding="utf-8"))
    g = build_graph(doc)
    report = analyze(g)
    label = {v: info.name for v, info in g.vertices.items()}
    print(f"{name}: {len(g.vertices)} vertices, {len(g.edges)} edges")
    print(f"  cycles: {[[label[v] for v in c] for c in report.cycles]}")
    order = report.topological_order
    print(f"  topological order: {[label[v] for v in order] if order else 'none (cyclic)'}\n")

g = build_graph(parse_document((CORPUS / "b1_branching.xrl.yaml").read_text(encoding="utf-8")))
print(export_dot(g))
print(export_mermaid(g))
