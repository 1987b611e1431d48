"""Turn action uses into concrete actions."""

from __future__ import annotations

from typing import Iterator, Mapping, Optional, Sequence

from .model import PLACEHOLDER_PREFIX, ActionUse, ElementDef, ResolvedAction


class ResolutionError(ValueError):
    """An action cannot be resolved. ``code`` is the matching validation rule."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def find_element(anchor: str, elements: Sequence[ElementDef]) -> ElementDef:
    for el in elements:
        if el.anchor == anchor:
            return el
    raise ResolutionError("XRL010", f"unknown element {anchor!r}")


def merge_params(defaults: Mapping, overrides: Mapping) -> dict:
    """Overlay ``overrides`` on ``defaults``; explicit keys win, declared order is kept."""
    merged = dict(defaults)
    merged.update(overrides)
    return merged


def resolve_action(use: ActionUse, elements: Sequence[ElementDef]) -> ResolvedAction:
    """Apply a use's overrides to its element definition.

    The explicit ``params`` of a use replace the merged-in mapping, then every
    declared key missing from the overrides falls back to the element
    default. A ``None`` surviving both steps is a required parameter nobody
    supplied.
    """
    el = find_element(use.element, elements)
    undeclared = [k for k in use.overrides if k not in el.params]
    if undeclared:
        raise ResolutionError(
            "XRL011",
            f"element {el.name!r} does not declare parameter(s) {', '.join(map(repr, undeclared))}",
        )
    params = merge_params(el.params, use.overrides)
    missing = [k for k, v in params.items() if v is None]
    if missing:
        raise ResolutionError(
            "XRL012",
            f"required parameter {', '.join(missing)} unsupplied for element {el.name!r}",
        )
    return ResolvedAction(el.name, el.text, params)


def placeholder_name(value) -> Optional[str]:
    if isinstance(value, str) and value.startswith(PLACEHOLDER_PREFIX):
        return value[len(PLACEHOLDER_PREFIX):]
    return None


def _substitute(step: ActionUse, owner: ElementDef, args: Mapping) -> ActionUse:
    overrides = {}
    for key, value in step.overrides.items():
        name = placeholder_name(value)
        if name is not None:
            if name not in owner.params:
                raise ResolutionError(
                    "XRL014",
                    f"placeholder {value!r} in {owner.name!r} names an undeclared parameter",
                )
            value = args[name]
        overrides[key] = value
    return ActionUse(step.element, overrides)


def _expand(
    element: ElementDef, args: Mapping, elements: Sequence[ElementDef], stack: tuple[str, ...]
) -> Iterator[ResolvedAction]:
    for step in element.steps or ():
        use = _substitute(step, element, args)
        target = find_element(use.element, elements)
        if target.anchor in stack:
            chain = " -> ".join(stack + (target.anchor,))
            raise ResolutionError("XRL013", f"cyclic composite reference {chain}")
        if target.is_composite:
            inner = resolve_action(use, elements).params
            yield from _expand(target, inner, elements, stack + (target.anchor,))
        else:
            yield resolve_action(use, elements)


def expand_composite(
    element: ElementDef, elements: Sequence[ElementDef], args: Optional[Mapping] = None
) -> list[ResolvedAction]:
    """Inline a composite element depth-first into basic actions.

    ``args`` are the composite's own parameter values (as supplied by a use);
    step override values of the form ``$param:<name>`` are replaced with them.
    """
    if not element.is_composite:
        raise ValueError(f"element {element.name!r} has no steps")
    scope = list(elements)
    if all(el.anchor != element.anchor for el in scope):
        scope.append(element)
    resolved = resolve_action(ActionUse(element.anchor, dict(args or {})), scope)
    return list(_expand(element, resolved.params, scope, (element.anchor,)))


def composite_cycles(elements: Sequence[ElementDef]) -> list[tuple[str, ...]]:
    """Anchor chains of composites that reach themselves through their steps."""
    by_anchor = {el.anchor: el for el in elements}
    found: list[tuple[str, ...]] = []
    seen_cycles: set[frozenset] = set()

    def walk(anchor: str, path: tuple[str, ...]) -> None:
        el = by_anchor.get(anchor)
        if el is None or not el.is_composite:
            return
        for step in el.steps:
            if step.element in path:
                cyc = path[path.index(step.element):]
                key = frozenset(cyc)
                if key not in seen_cycles:
                    seen_cycles.add(key)
                    found.append(cyc)
                continue
            walk(step.element, path + (step.element,))

    for el in elements:
        walk(el.anchor, (el.anchor,))
    return found
