"""Deterministic dry-run engine."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from ..core.model import XrlDocument
from ..graph import ProcessGraph, build_graph, expand_composites_in_graph
from .env import VirtualEnv
from .handlers import HandlerFault, HandlerRegistry, Successor, builtin_handlers

COMPLETED = "completed"
BUDGET_EXHAUSTED = "budget_exhausted"
FAULTED = "faulted"


class MissingHandlerError(LookupError):
    def __init__(self, element_names):
        self.element_names = sorted(element_names)
        super().__init__(f"no handler registered for: {', '.join(self.element_names)}")


@dataclass(frozen=True)
class StepBudget:
    max_steps: int = 10_000

    def __post_init__(self) -> None:
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")


@dataclass(frozen=True)
class StepRecord:
    ordinal: int
    node: str
    element_name: str
    params: dict
    env_digest: str

    def to_dict(self) -> dict:
        return {
            "ordinal": self.ordinal,
            "node": self.node,
            "element": self.element_name,
            "params": dict(self.params),
            "env_digest": self.env_digest,
        }


@dataclass(frozen=True)
class Outcome:
    kind: str
    message: Optional[str] = None
    node: Optional[str] = None

    def __str__(self) -> str:
        if self.kind == FAULTED:
            return f"faulted at {self.node}: {self.message}"
        return self.kind


@dataclass(frozen=True)
class ExecutionTrace:
    steps: tuple[StepRecord, ...]
    outcome: Outcome
    final_env: VirtualEnv

    @property
    def completed(self) -> bool:
        return self.outcome.kind == COMPLETED

    def nodes(self) -> list[str]:
        return [s.node for s in self.steps]

    def to_dict(self) -> dict:
        return {
            "steps": [s.to_dict() for s in self.steps],
            "outcome": {
                "kind": self.outcome.kind,
                "message": self.outcome.message,
                "node": self.outcome.node,
            },
            "final_env_digest": self.final_env.digest(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = []
        for s in self.steps:
            params = json.dumps(s.params, sort_keys=False, ensure_ascii=False)
            lines.append(f"{s.ordinal:>4} {s.node} {s.element_name} {params} {s.env_digest}")
        lines.append(str(self.outcome))
        return "\n".join(lines) + "\n"


def simulate_graph(
    g: ProcessGraph,
    env0: VirtualEnv,
    registry: Optional[HandlerRegistry] = None,
    budget: StepBudget = StepBudget(),
) -> ExecutionTrace:
    """Walk ``g`` from its start vertex, letting each handler pick the successor."""
    registry = builtin_handlers() if registry is None else registry
    missing = {info.action.element_name for info in g.vertices.values()} - set(registry)
    if missing:
        raise MissingHandlerError(missing)

    adjacency = g.adjacency()
    steps: list[StepRecord] = []
    env = env0
    node = g.start
    while True:
        info = g.vertices[node]
        successors = [Successor(s, g.vertices[s].name) for s in adjacency[node]]
        handler = registry.get(info.action.element_name)
        try:
            env, chosen = handler.apply(info.action, env, successors)
        except HandlerFault as exc:
            return ExecutionTrace(tuple(steps), Outcome(FAULTED, str(exc), node), env)
        steps.append(
            StepRecord(len(steps) + 1, node, info.action.element_name, dict(info.action.params), env.digest())
        )
        if node == g.end:
            return ExecutionTrace(tuple(steps), Outcome(COMPLETED), env)
        if len(steps) >= budget.max_steps:
            return ExecutionTrace(tuple(steps), Outcome(BUDGET_EXHAUSTED), env)
        if chosen is None:
            return ExecutionTrace(
                tuple(steps), Outcome(FAULTED, "no successor chosen before the end node", node), env
            )
        if chosen not in adjacency[node]:
            return ExecutionTrace(
                tuple(steps), Outcome(FAULTED, f"{chosen} is not a successor", node), env
            )
        node = chosen


def simulate(
    doc: XrlDocument,
    env0: VirtualEnv,
    registry: Optional[HandlerRegistry] = None,
    budget: StepBudget = StepBudget(),
) -> ExecutionTrace:
    """Dry-run a validated document; composites are expanded before the first step."""
    g = expand_composites_in_graph(build_graph(doc), doc.elements)
    return simulate_graph(g, env0, registry, budget)
