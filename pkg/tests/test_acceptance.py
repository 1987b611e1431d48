"""Acceptance criteria A1 to A9. Each test prints exactly one PASS/FAIL line."""

from __future__ import annotations

import contextlib
import io
import random
import statistics

from xrl.cli import EXIT_INVALID, EXIT_OK, EXIT_PARSE, EXIT_SIM, EXIT_USAGE, run
from xrl.core import (
    ActionUse,
    ElementDef,
    ResolutionError,
    Severity,
    format_canonical,
    parse_document,
    resolve_action,
    structurally_equal,
)
from xrl.graph import analyze, build_graph, expand_composites_in_graph
from xrl.interop import export_gax, import_gax, semantic_equal
from xrl.sim import SCENARIOS, VirtualEnv, load_scenario, simulate, simulate_graph
from xrl.validate import validate_document

from conftest import CORPUS, CORPUS_DIR, load
from mutations import MUTATIONS
from oracles import canonical_cycle, cycle_oracle, matrix_closure, merge_oracle, random_graphs, toy_graph

SCENARIO_DIR = CORPUS_DIR.parents[1] / "src" / "xrl" / "sim" / "scenarios"


def test_a1_round_trip(criterion):
    failures = []
    for name, source in CORPUS.items():
        doc = parse_document(source)
        once = format_canonical(doc)
        again = parse_document(once)
        if not (structurally_equal(doc, again) and format_canonical(again) == once):
            failures.append(name)
    required = {"p1_search_email", "p2_db_report", "p3_excel_crm", "c1_composite", "b1_branching"}
    ok = len(CORPUS) >= 20 and required <= set(CORPUS) and not failures
    assert criterion("A1", ok, f"round-trip and fixpoint exact on {len(CORPUS) - len(failures)}/{len(CORPUS)} documents {failures or ''}".rstrip())


def _random_case(rng: random.Random):
    keys = rng.sample("abcdefghij", rng.randint(0, 6))
    values = ["", "x", "#submit", 0, 7, -3, 2.5, True, False, None]
    defaults = {k: rng.choice(values) for k in keys}
    overrides = {k: rng.choice(values[:-1]) for k in keys if rng.random() < 0.6}
    return defaults, overrides


def test_a2_merge_oracle(criterion):
    rng = random.Random(4242)
    agree = 0
    for _ in range(200):
        defaults, overrides = _random_case(rng)
        expected = merge_oracle(defaults, overrides)
        el = ElementDef("e", "E", "", defaults)
        try:
            got = resolve_action(ActionUse("E", overrides), [el]).params
        except ResolutionError as exc:
            got = exc.code
        want = "XRL012" if None in expected.values() else expected
        # dict equality ignores order; keep declared order too
        agree += got == want and (isinstance(got, str) or list(got) == list(expected))
    assert criterion("A2", agree == 200, f"{agree}/200 resolve_action cases equal the copy-then-overwrite oracle")


def test_a3_mutation_matrix(criterion):
    s1 = load("s1_linear")
    exact = 0
    for code, mutate in sorted(MUTATIONS.items()):
        errors = {d.code for d in validate_document(mutate(s1)) if d.severity is Severity.ERROR}
        exact += errors == {code}
    clean_errors = sum(
        d.severity is Severity.ERROR for name in CORPUS for d in validate_document(load(name))
    )
    ok = exact == 12 and len(MUTATIONS) == 12 and clean_errors == 0
    assert criterion("A3", ok, f"{exact}/12 mutations trigger exactly their rule; {clean_errors} errors on clean corpus")


def test_a4_graph_oracle(criterion):
    matches = 0
    for n, edges, start, end in random_graphs(500):
        report = analyze(toy_graph(n, edges, start, end))
        idx = lambda vs: {int(v[1:]) for v in vs}
        cycles = {canonical_cycle([int(v[1:]) for v in c]) for c in report.cycles}
        matches += (
            idx(report.reachable) == matrix_closure(n, edges, start)
            and idx(report.co_reachable) == matrix_closure(n, edges, end, transpose=True)
            and cycles == cycle_oracle(n, edges)
            and len(cycles) == len(report.cycles)
        )
    assert criterion("A4", matches == 500, f"{matches}/500 random graphs match brute-force closure and cycle sets")


def test_a5_scenario_replay(criterion):
    results = []
    for name in SCENARIOS:
        doc, env0, expected = load_scenario(name)
        trace = simulate(doc, env0)
        results.append(trace.completed and trace.final_env.digest() == expected)
    ok = all(results)
    assert criterion("A5", ok, f"{sum(results)}/3 scenarios complete with the expected final digest")


def _comparable(trace):
    steps = [(s.element_name, s.params, s.env_digest) for s in trace.steps]
    return steps, trace.outcome.kind, trace.final_env.digest()


def test_a6_composite_equivalence(criterion):
    composite = load("c1_composite")
    expanded = expand_composites_in_graph(build_graph(composite), composite.elements)
    a = simulate_graph(expanded, VirtualEnv())
    b = simulate(load("c1_flat"), VirtualEnv())
    ok = a.completed and len(a.steps) == 7 and _comparable(a) == _comparable(b)
    assert criterion("A6", ok, f"expanded C1 and flattened C1 agree on {len(a.steps)} steps modulo generated GUIDs")


def test_a7_readability_proxy(criterion):
    ratios, failing = [], []
    for name in sorted(CORPUS):
        doc = load(name)
        if len(doc.nodes) < 3:
            continue
        xrl_chars, gax_chars = len(format_canonical(doc)), len(export_gax(doc))
        ratios.append(gax_chars / xrl_chars)
        if gax_chars <= xrl_chars:
            failing.append(name)
    mean = statistics.mean(ratios)
    ok = not failing
    assert criterion("A7", ok, f"GAX longer than XRL for {len(ratios) - len(failing)}/{len(ratios)} documents; mean ratio {mean:.3f}")


def test_a8_interop(criterion):
    mismatched = [name for name in CORPUS if not semantic_equal(import_gax(export_gax(load(name))), load(name))]
    doc, env0, _ = load_scenario("p1_search_email")
    imported = import_gax((CORPUS_DIR / "p1_search_email.gax.xml").read_text(encoding="utf-8"))
    same_trace = simulate(imported, env0).to_json() == simulate(doc, env0).to_json()
    ok = not mismatched and same_trace
    assert criterion(
        "A8", ok,
        f"{len(CORPUS) - len(mismatched)}/{len(CORPUS)} documents survive GAX round trip; hand-written P1 trace identical: {same_trace}",
    )


def _cli(argv) -> tuple[int, str]:
    out = io.StringIO()
    return run([str(a) for a in argv], out), out.getvalue()


def test_a9_cli_contract(criterion, tmp_path):
    path = lambda n: SCENARIO_DIR / f"{n}.xrl.yaml" if n in SCENARIOS else CORPUS_DIR / f"{n}.xrl.yaml"
    matrix = [(["validate", path(n)], EXIT_OK) for n in sorted(CORPUS)]
    s1 = load("s1_linear")
    for code, mutate in sorted(MUTATIONS.items()):
        p = tmp_path / f"{code}.xrl.yaml"
        p.write_text(format_canonical(mutate(s1)), encoding="utf-8")
        matrix.append((["validate", p], EXIT_PARSE if code == "XRL010" else EXIT_INVALID))
    broken = tmp_path / "broken.xrl.yaml"
    broken.write_text(CORPUS["s1_linear"].replace("*NODE_2_ID]", "*NODE_9]"), encoding="utf-8")
    matrix += [
        (["validate", broken], EXIT_PARSE),
        (["run", path("b1_branching")], EXIT_SIM),
        (["run", path("s1_linear"), "--max-steps", "1"], EXIT_SIM),
        (["run", path("p1_search_email"), "--scenario-env", "p1_search_email"], EXIT_OK),
        (["graph", path("c1_composite"), "--expand"], EXIT_OK),
        (["convert", path("s1_linear"), "--to", "gax"], EXIT_OK),
        (["lint", path("literal_guids")], EXIT_OK),
        (["fmt", path("typed_params")], EXIT_OK),
        (["bogus"], EXIT_USAGE),
        (["run", path("s1_linear"), "--max-steps", "0"], EXIT_USAGE),
    ]
    wrong = []
    with contextlib.redirect_stderr(io.StringIO()):
        for argv, expected in matrix:
            first, second = _cli(argv), _cli(argv)
            if first[0] != expected or first != second:
                wrong.append(argv[0])
    ok = not wrong
    assert criterion("A9", ok, f"{len(matrix) - len(wrong)}/{len(matrix)} invocations give the tabled exit code with identical output")
