"""Action handlers and the builtin set of basic elements."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple, Optional, Sequence

from ..core.model import ResolvedAction
from .env import Message, VirtualEnv

FILE_PREFIX = "file:"
LAST_READ = "_last_read"


class Successor(NamedTuple):
    guid: str
    name: str


class HandlerFault(Exception):
    """A handler cannot perform its action in the given environment."""


class DuplicateHandlerError(ValueError):
    pass


ApplyFn = Callable[[ResolvedAction, VirtualEnv, Sequence[Successor]], "tuple[VirtualEnv, Optional[str]]"]


@dataclass(frozen=True)
class ActionHandler:
    """Binds an element name to a pure ``apply`` function.

    ``apply`` returns the new environment and the GUID of the chosen
    successor, or ``None`` to stop. It raises :class:`HandlerFault` on failure.
    """

    element_name: str
    apply: ApplyFn


class HandlerRegistry:
    def __init__(self) -> None:
        self._handlers: dict[str, ActionHandler] = {}

    def register(self, handler: ActionHandler) -> None:
        if handler.element_name in self._handlers:
            raise DuplicateHandlerError(
                f"a handler for {handler.element_name!r} is already registered"
            )
        self._handlers[handler.element_name] = handler

    def get(self, element_name: str) -> Optional[ActionHandler]:
        return self._handlers.get(element_name)

    def __contains__(self, element_name: object) -> bool:
        return element_name in self._handlers

    def __len__(self) -> int:
        return len(self._handlers)

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self._handlers))


def register_handler(registry: HandlerRegistry, handler: ActionHandler) -> HandlerRegistry:
    registry.register(handler)
    return registry


# -- helpers -------------------------------------------------------------------

def choose_successor(action: ResolvedAction, successors: Sequence[Successor]) -> Optional[str]:
    """First successor, or the one whose node name equals a non-empty ``goto``."""
    goto = action.params.get("goto")
    if goto:
        for s in successors:
            if s.name == goto:
                return s.guid
        raise HandlerFault(f"no successor named {goto!r}")
    return successors[0].guid if successors else None


def _deref(value, env: VirtualEnv) -> str:
    if value == "$last_read":
        if LAST_READ not in env.scratch:
            raise HandlerFault("nothing has been read yet")
        return env.scratch[LAST_READ]
    if value == "$clipboard":
        return env.clipboard
    return "" if value is None else str(value)


def _focused(env: VirtualEnv) -> str:
    if env.focused_window is None:
        raise HandlerFault("no focused window")
    return env.focused_window


def _write_target(env: VirtualEnv, target: str, value: str) -> VirtualEnv:
    if target.startswith(FILE_PREFIX):
        return env.with_file(target[len(FILE_PREFIX):], value)
    return env.with_field(_focused(env), target, value)


def _read_target(env: VirtualEnv, target: str) -> str:
    if target.startswith(FILE_PREFIX):
        path = target[len(FILE_PREFIX):]
        if path not in env.files:
            raise HandlerFault(f"no file {path!r}")
        return env.files[path]
    window = _focused(env)
    fields = env.windows[window]
    if target not in fields:
        raise HandlerFault(f"window {window!r} has no field {target!r}")
    return fields[target]


def _param(action: ResolvedAction, key: str) -> str:
    if key not in action.params:
        raise HandlerFault(f"{action.element_name} needs parameter {key!r}")
    return str(action.params[key])


# -- builtin elements ------------------------------------------------------------

def _launch(action, env, successors):
    return env.with_window(_param(action, "app")), choose_successor(action, successors)


def _focus(action, env, successors):
    window = _param(action, "window")
    if window not in env.windows:
        raise HandlerFault(f"no window {window!r}")
    return env.with_window(window), choose_successor(action, successors)


def _click(action, env, successors):
    window = _focused(env)
    return env.with_field(window, _param(action, "target"), "clicked"), choose_successor(
        action, successors
    )


def _type_text(action, env, successors):
    value = _deref(action.params.get("value"), env)
    return _write_target(env, _param(action, "target"), value), choose_successor(action, successors)


def _read_value(action, env, successors):
    text = _read_target(env, _param(action, "target"))
    pattern = action.params.get("match") or ""
    if pattern:
        m = re.search(pattern, text)
        if m is None:
            raise HandlerFault(f"pattern {pattern!r} not found")
        text = m.group(1) if m.re.groups else m.group(0)
    return env.with_scratch(LAST_READ, text), choose_successor(action, successors)


def _set_clipboard(action, env, successors):
    value = _deref(action.params.get("value"), env)
    return env.with_clipboard(value), choose_successor(action, successors)


def _get_clipboard(action, env, successors):
    return _write_target(env, _param(action, "target"), env.clipboard), choose_successor(
        action, successors
    )


def _navigate(action, env, successors):
    return env.with_window(_param(action, "url")), choose_successor(action, successors)


def _send_message(action, env, successors):
    message = Message(
        to=_deref(action.params.get("to"), env),
        subject=_deref(action.params.get("subject"), env),
        body=_deref(action.params.get("body"), env),
    )
    if not message.to:
        raise HandlerFault("message has no recipient")
    return env.with_message(message), choose_successor(action, successors)


def _wait(action, env, successors):
    return env, choose_successor(action, successors)


BUILTINS: dict[str, ApplyFn] = {
    "launch": _launch,
    "focus": _focus,
    "click": _click,
    "type_text": _type_text,
    "read_value": _read_value,
    "set_clipboard": _set_clipboard,
    "get_clipboard": _get_clipboard,
    "navigate": _navigate,
    "send_message": _send_message,
    "wait": _wait,
}


def builtin_handlers() -> HandlerRegistry:
    registry = HandlerRegistry()
    for name, fn in BUILTINS.items():
        register_handler(registry, ActionHandler(name, fn))
    return registry
