"""Dry-run engine over a virtual desktop."""

from .engine import (
    BUDGET_EXHAUSTED,
    COMPLETED,
    FAULTED,
    ExecutionTrace,
    MissingHandlerError,
    Outcome,
    StepBudget,
    StepRecord,
    simulate,
    simulate_graph,
)
from .env import Message, VirtualEnv
from .handlers import (
    ActionHandler,
    DuplicateHandlerError,
    HandlerFault,
    HandlerRegistry,
    Successor,
    builtin_handlers,
    register_handler,
)
from .scenarios import SCENARIOS, UnknownScenarioError, load_scenario

__all__ = [
    "BUDGET_EXHAUSTED",
    "COMPLETED",
    "FAULTED",
    "SCENARIOS",
    "ActionHandler",
    "DuplicateHandlerError",
    "ExecutionTrace",
    "HandlerFault",
    "HandlerRegistry",
    "Message",
    "MissingHandlerError",
    "Outcome",
    "StepBudget",
    "StepRecord",
    "Successor",
    "UnknownScenarioError",
    "VirtualEnv",
    "builtin_handlers",
    "load_scenario",
    "register_handler",
    "simulate",
    "simulate_graph",
]
