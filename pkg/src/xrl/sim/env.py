"""Virtual desktop state used for dry runs."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional


@dataclass(frozen=True)
class Message:
    to: str
    subject: str
    body: str


@dataclass(frozen=True)
class VirtualEnv:
    """Snapshot of the simulated desktop.

    Instances are never modified; handlers derive new ones through the
    ``with_*`` helpers.
    """

    windows: Mapping[str, Mapping[str, str]] = field(default_factory=dict)
    clipboard: str = ""
    files: Mapping[str, str] = field(default_factory=dict)
    focused_window: Optional[str] = None
    sent_messages: tuple[Message, ...] = ()
    scratch: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.focused_window is not None and self.focused_window not in self.windows:
            raise ValueError(f"focused window {self.focused_window!r} does not exist")

    def with_window(self, name: str, focus: bool = True) -> VirtualEnv:
        windows = dict(self.windows)
        windows.setdefault(name, {})
        return replace(self, windows=windows, focused_window=name if focus else self.focused_window)

    def with_field(self, window: str, name: str, value: str) -> VirtualEnv:
        windows = dict(self.windows)
        fields = dict(windows.get(window, {}))
        fields[name] = value
        windows[window] = fields
        return replace(self, windows=windows)

    def with_file(self, path: str, content: str) -> VirtualEnv:
        return replace(self, files={**self.files, path: content})

    def with_clipboard(self, value: str) -> VirtualEnv:
        return replace(self, clipboard=value)

    def with_scratch(self, key: str, value: str) -> VirtualEnv:
        return replace(self, scratch={**self.scratch, key: value})

    def with_message(self, message: Message) -> VirtualEnv:
        return replace(self, sent_messages=self.sent_messages + (message,))

    def to_dict(self) -> dict:
        return {
            "windows": {w: dict(sorted(f.items())) for w, f in sorted(self.windows.items())},
            "clipboard": self.clipboard,
            "files": dict(sorted(self.files.items())),
            "focused_window": self.focused_window,
            "sent_messages": [
                {"to": m.to, "subject": m.subject, "body": m.body} for m in self.sent_messages
            ],
            "scratch": dict(sorted(self.scratch.items())),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> VirtualEnv:
        return cls(
            windows={w: dict(f) for w, f in data.get("windows", {}).items()},
            clipboard=data.get("clipboard", ""),
            files=dict(data.get("files", {})),
            focused_window=data.get("focused_window"),
            sent_messages=tuple(Message(**m) for m in data.get("sent_messages", ())),
            scratch=dict(data.get("scratch", {})),
        )

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form (sorted keys, compact separators, UTF-8)."""
        blob = json.dumps(
            self.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False
        )
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()
