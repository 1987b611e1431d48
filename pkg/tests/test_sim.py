from __future__ import annotations

import json
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xrl.core import ResolvedAction
from xrl.graph import build_graph
from xrl.sim import (
    BUDGET_EXHAUSTED,
    COMPLETED,
    FAULTED,
    SCENARIOS,
    ActionHandler,
    DuplicateHandlerError,
    HandlerFault,
    HandlerRegistry,
    MissingHandlerError,
    StepBudget,
    Successor,
    UnknownScenarioError,
    VirtualEnv,
    builtin_handlers,
    load_scenario,
    register_handler,
    simulate,
)
from xrl.sim.scenarios import scenario_data

from conftest import CORPUS, load

BUILTIN_NAMES = {
    "launch", "focus", "click", "type_text", "read_value",
    "set_clipboard", "get_clipboard", "navigate", "send_message", "wait",
}


def act(name: str, **params) -> ResolvedAction:
    return ResolvedAction(name, "", params)


def apply(name: str, env: VirtualEnv, successors=(), **params):
    return builtin_handlers().get(name).apply(act(name, **params), env, list(successors))


# -- registry -----------------------------------------------------------------------

def noop(action, env, successors):
    return env, None


def test_register_into_empty_registry():
    assert len(register_handler(HandlerRegistry(), ActionHandler("click", noop))) == 1


def test_duplicate_registration_fails():
    registry = register_handler(HandlerRegistry(), ActionHandler("click", noop))
    with pytest.raises(DuplicateHandlerError):
        register_handler(registry, ActionHandler("click", noop))


def test_builtin_set():
    registry = builtin_handlers()
    assert len(registry) == 10
    assert set(registry) == BUILTIN_NAMES


# -- environment ---------------------------------------------------------------------

def test_env_rejects_unknown_focus():
    with pytest.raises(ValueError):
        VirtualEnv(focused_window="ghost")


def test_env_dict_round_trip():
    env = VirtualEnv().with_window("b").with_field("b", "x", "1").with_file("f", "z").with_clipboard("c")
    assert VirtualEnv.from_dict(env.to_dict()) == env
    assert VirtualEnv.from_dict(json.loads(json.dumps(env.to_dict()))).digest() == env.digest()


def test_digest_ignores_insertion_order():
    a = VirtualEnv().with_file("a", "1").with_file("b", "2")
    b = VirtualEnv().with_file("b", "2").with_file("a", "1")
    assert a.digest() == b.digest()
    assert re.fullmatch(r"[0-9a-f]{64}", a.digest())


def test_digest_of_empty_env_is_pinned():
    # sha256 of the compact sorted JSON of an empty environment
    import hashlib

    blob = '{"clipboard":"","files":{},"focused_window":null,"scratch":{},"sent_messages":[],"windows":{}}'
    assert VirtualEnv().digest() == hashlib.sha256(blob.encode()).hexdigest()


# -- builtin handlers ------------------------------------------------------------------

def test_launch_creates_and_focuses():
    env, _ = apply("launch", VirtualEnv(), app="totalcmd")
    assert "totalcmd" in env.windows and env.focused_window == "totalcmd"


def test_type_text_needs_focus():
    with pytest.raises(HandlerFault, match="no focused window"):
        apply("type_text", VirtualEnv(), target="x", value="y")


def test_read_then_set_clipboard():
    env = VirtualEnv().with_window("calc").with_field("calc", "result", "42")
    env, _ = apply("read_value", env, target="result")
    env, _ = apply("set_clipboard", env, value="$last_read")
    assert env.clipboard == "42"


def test_set_clipboard_before_read_faults():
    with pytest.raises(HandlerFault):
        apply("set_clipboard", VirtualEnv(), value="$last_read")


@pytest.mark.parametrize(
    "pattern, expected",
    [("", "Ref: AB-12; end"), (r"AB-\d+", "AB-12"), (r"Ref: (\w+)", "AB")],
)
def test_read_value_match(pattern, expected):
    env = VirtualEnv().with_file("doc.txt", "Ref: AB-12; end")
    env, _ = apply("read_value", env, target="file:doc.txt", match=pattern)
    assert env.scratch["_last_read"] == expected


def test_read_value_missing_pattern_faults():
    env = VirtualEnv().with_file("doc.txt", "nothing")
    with pytest.raises(HandlerFault):
        apply("read_value", env, target="file:doc.txt", match="XYZ")


def test_get_clipboard_and_send_message():
    env = VirtualEnv().with_window("mail").with_clipboard("hello")
    env, _ = apply("get_clipboard", env, target="body")
    env, _ = apply("send_message", env, to="a@b.c", subject="s", body="$clipboard")
    assert env.windows["mail"]["body"] == "hello"
    assert env.sent_messages[-1].body == "hello"


def test_navigate_and_focus():
    env, _ = apply("navigate", VirtualEnv(), url="https://x.example")
    env, _ = apply("launch", env, app="other")
    env, _ = apply("focus", env, window="https://x.example")
    assert env.focused_window == "https://x.example"
    with pytest.raises(HandlerFault):
        apply("focus", env, window="missing")


def test_wait_changes_nothing():
    env = VirtualEnv().with_window("w")
    assert apply("wait", env, ms=10)[0] == env


def test_click_marks_target_and_picks_successor():
    env = VirtualEnv().with_window("w")
    succ = [Successor("g1", "one"), Successor("g2", "two")]
    env, chosen = apply("click", env, succ, target="ok", goto="")
    assert env.windows["w"]["ok"] == "clicked"
    assert chosen == "g1"
    assert apply("click", env, succ, target="ok", goto="two")[1] == "g2"
    with pytest.raises(HandlerFault):
        apply("click", env, succ, target="ok", goto="three")


# -- engine ------------------------------------------------------------------------------

def test_budget_of_one_on_s1(s1):
    trace = simulate(s1, VirtualEnv(), budget=StepBudget(1))
    assert trace.outcome.kind == BUDGET_EXHAUSTED
    assert len(trace.steps) == 1


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        StepBudget(0)


def test_cyclic_document_respects_budget():
    doc = load("loop_retry")
    spin = {"goto": "retry"}
    # force the check step to loop forever by sending it back to retry
    from dataclasses import replace

    flow = list(doc.flow)
    flow[2] = replace(flow[2], action=replace(flow[2].action, overrides={"target": "login", **spin}))
    doc = replace(doc, flow=tuple(flow))
    trace = simulate(doc, VirtualEnv(), budget=StepBudget(25))
    assert trace.outcome.kind == BUDGET_EXHAUSTED
    assert len(trace.steps) == 25


def test_branch_follows_goto():
    doc = load("b1_branching")
    env0 = VirtualEnv().with_window("menu_app")
    trace = simulate(doc, env0)
    names = {n.id: n.name for n in doc.nodes}
    assert [names[n] for n in trace.nodes()] == ["choose", "branch_b", "finish"]
    assert trace.final_env.windows["menu_app"]["note"] == "took branch B"


def test_fault_is_reported_without_a_step():
    doc = load("b1_branching")
    trace = simulate(doc, VirtualEnv())
    assert trace.outcome.kind == FAULTED
    assert trace.outcome.node == doc.start
    assert trace.steps == ()
    assert trace.to_text().splitlines()[-1].startswith("faulted at")


def test_missing_handler_is_prechecked():
    with pytest.raises(MissingHandlerError, match="configure"):
        simulate(load("typed_params"), VirtualEnv())


def test_custom_handler_extends_registry():
    registry = builtin_handlers()
    seen = []

    def configure(action, env, successors):
        seen.append(action.params["retries"])
        return env, successors[0].guid if successors else None

    register_handler(registry, ActionHandler("configure", configure))
    trace = simulate(load("typed_params"), VirtualEnv().with_window("form"), registry)
    assert trace.completed and seen == [5]


@pytest.mark.parametrize("name", ["s1_linear", "c1_composite", "long_chain", "fan_out_in", "loop_retry", "nested_composite"])
def test_trace_steps_follow_graph_edges(name):
    doc = load(name)
    trace = simulate(doc, VirtualEnv())
    assert trace.completed
    g = build_graph(doc)
    from xrl.graph import expand_composites_in_graph

    edges = expand_composites_in_graph(g, doc.elements).edges
    nodes = trace.nodes()
    assert all(pair in edges for pair in zip(nodes, nodes[1:]))
    assert [s.ordinal for s in trace.steps] == list(range(1, len(nodes) + 1))
    assert nodes[-1] == expand_composites_in_graph(g, doc.elements).end


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(sorted(CORPUS)))
def test_simulation_is_deterministic(name):
    doc = load(name)
    env0 = VirtualEnv().with_window("desk")
    try:
        first = simulate(doc, env0)
    except MissingHandlerError:
        return
    assert simulate(load(name), env0).to_json() == first.to_json()


def test_trace_serializations(s1):
    trace = simulate(s1, VirtualEnv())
    data = json.loads(trace.to_json())
    assert data["outcome"]["kind"] == COMPLETED
    assert [s["element"] for s in data["steps"]] == ["launch", "click", "wait"]
    assert data["final_env_digest"] == trace.final_env.digest()
    lines = trace.to_text().splitlines()
    assert len(lines) == 4 and lines[-1] == "completed"


# -- scenarios ------------------------------------------------------------------------------

@pytest.mark.parametrize("name", SCENARIOS)
def test_scenario_completes_with_expected_digest(name):
    doc, env0, expected = load_scenario(name)
    trace = simulate(doc, env0)
    assert trace.completed
    assert trace.final_env.digest() == expected


def test_p1_sends_the_phrase_found_in_the_file():
    doc, env0, _ = load_scenario("p1_search_email")
    assert len(doc.flow) >= 8
    contract = env0.files["docs/contract_2023.txt"]
    phrase = re.search(r"ACME-\d{4}-\d{3}", contract).group(0)
    final = simulate(doc, env0).final_env
    assert len(final.sent_messages) == 1
    assert final.sent_messages[0].body == phrase


def test_p2_writes_report():
    doc, env0, _ = load_scenario("p2_db_report")
    assert "report.pdf" not in env0.files
    final = simulate(doc, env0).final_env
    assert final.files["report.pdf"].startswith("Disk Usage report")


def test_p3_copies_row_into_crm():
    doc, env0, _ = load_scenario("p3_excel_crm")
    data = scenario_data("p3_excel_crm")
    header, first, *_ = env0.files["clients.xlsx"].splitlines()
    row = dict(zip(header.split(";"), first.split(";")))
    assert row == data["row"]
    final = simulate(doc, env0).final_env
    fields = final.windows[data["crm_window"]]
    assert {k: fields[k] for k in row} == row


def test_unknown_scenario():
    with pytest.raises(UnknownScenarioError):
        load_scenario("p4_nope")
