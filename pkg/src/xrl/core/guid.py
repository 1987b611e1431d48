"""GUID literals used as node identifiers."""

from __future__ import annotations

import re
import uuid
from typing import NewType

Guid = NewType("Guid", str)

GUID_RE = re.compile(
    r"[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}"
)

# Namespace for GUIDs generated while expanding composites.
EXPANSION_NAMESPACE = uuid.UUID("6f1d9a52-3c1e-5b0e-9a57-0d7c3e2b8a41")


class GuidError(ValueError):
    pass


def parse_guid(text: str) -> Guid:
    """Normalize a hyphenated 8-4-4-4-12 GUID to lowercase.

    Version and variant nibbles are not checked.
    """
    if not isinstance(text, str):
        raise GuidError(f"GUID must be text, got {type(text).__name__}")
    lowered = text.strip().lower()
    if len(lowered) != 36:
        raise GuidError(f"GUID {text!r} must be 36 characters, got {len(lowered)}")
    if not GUID_RE.fullmatch(lowered):
        raise GuidError(
            f"GUID {text!r} must be hexadecimal in 8-4-4-4-12 hyphenated groups"
        )
    return Guid(lowered)


def is_guid(text: object) -> bool:
    if not isinstance(text, str):
        return False
    try:
        parse_guid(text)
    except GuidError:
        return False
    return True


def derived_guid(parent: str, index: int) -> Guid:
    """Deterministic GUID for step ``index`` of the composite expanded at ``parent``."""
    return Guid(str(uuid.uuid5(EXPANSION_NAMESPACE, f"{parent}/{index}")))
