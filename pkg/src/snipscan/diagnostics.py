"""Shared counter bag for best-effort stages that skip or repair input."""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["Diagnostics"]


@dataclass
class Diagnostics:
    counters: dict[str, int] = field(default_factory=dict)

    def bump(self, key: str, by: int = 1) -> None:
        self.counters[key] = self.counters.get(key, 0) + by

    def get(self, key: str) -> int:
        return self.counters.get(key, 0)
