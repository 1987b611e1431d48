"""A "send email to X" composite, expanded into basic steps and checked against a hand-flattened copy."""

from pathlib import Path

from xrl.core import expand_composite, parse_document
from xrl.graph import build_graph, expand_composites_in_graph
from xrl.sim import VirtualEnv, simulate

CORPUS = Path(__file__).resolve().parents[1] / "tests" / "corpus"


def load(name):
    return parse_document((CORPUS / f"{name}.xrl.yaml").read_text(encoding="utf-8"))


doc = load("c1_composite")
send = next(el for el in doc.elements if el.name == "send_email")
print("send_email with to=a@b.c expands to:")
for action in expand_composite(send, doc.elements, {"to": "a@b.c", "subject": "s", "body": "x"}):
    print(f"  {action.element_name:<10} {action.params}")

g = build_graph(doc)
expanded = expand_composites_in_graph(g, doc.elements)
print(f"\nGraph: {len(g.vertices)} vertices before expansion, {len(expanded.vertices)} after")
for v, info in expanded.vertices.items():
    print(f"  {v}  {info.name}")

a, b = simulate(doc, VirtualEnv()), simulate(load("c1_flat"), VirtualEnv())
same = [s.env_digest for s in a.steps] == [s.env_digest for s in b.steps]
print(f"\nComposite and flattened runs pass through identical states: {same}")
