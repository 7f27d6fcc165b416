"""Scaling parameters and family identifiers."""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass


class ModelFamily(str, enum.Enum):
    Philosophers = "Philosophers"
    FMS = "FMS"
    Kanban = "Kanban"
    SharedMemory = "SharedMemory"
    TokenRing = "TokenRing"
    Peterson = "Peterson"
    Lamport = "Lamport"
    Eratosthenes = "Eratosthenes"
    RwMutex = "RwMutex"
    SimpleLbs = "SimpleLbs"

    @classmethod
    def parse(cls, text: str) -> "ModelFamily":
        key = text.replace("-", "").replace("_", "").lower()
        for fam in cls:
            if fam.value.lower() == key:
                return fam
        raise ValueError(f"unknown model family {text!r}; known: {', '.join(f.value for f in cls)}")


_PAIR = re.compile(r"^r(\d+)w(\d+)$")


@dataclass(frozen=True, order=True)
class ModelParams:
    """Either a single scaling value ``n`` or a reader/writer pair."""

    n: int | None = None
    r: int | None = None
    w: int | None = None

    def __post_init__(self):
        single = self.n is not None
        pair = self.r is not None or self.w is not None
        if single == pair:
            raise ValueError("ModelParams needs exactly one of n or (r, w)")
        if pair and (self.r is None or self.w is None):
            raise ValueError("pair parameters need both r and w")

    @property
    def is_pair(self) -> bool:
        return self.n is None

    @property
    def scale(self) -> int:
        """The value plotted on scaling axes (the writer count for pairs)."""
        return self.w if self.is_pair else self.n

    def components(self) -> tuple[int, ...]:
        return (self.r, self.w) if self.is_pair else (self.n,)

    def __str__(self) -> str:
        return f"r{self.r}w{self.w}" if self.is_pair else str(self.n)

    @classmethod
    def parse(cls, text) -> "ModelParams":
        if isinstance(text, ModelParams):
            return text
        if isinstance(text, int) and not isinstance(text, bool):
            return cls(n=text)
        if isinstance(text, tuple) and len(text) == 2:
            return cls(r=int(text[0]), w=int(text[1]))
        s = str(text).strip()
        m = _PAIR.match(s)
        if m:
            return cls(r=int(m.group(1)), w=int(m.group(2)))
        if s.isdigit():
            return cls(n=int(s))
        raise ValueError(f"cannot parse model parameter {text!r}")
