"""Answer records shared by the engine and the reference implementations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class RankedAnswer:
    rank: int
    weight: Any
    assignment: dict
    witness: tuple | None = None
    rows: tuple | None = field(default=None, repr=False)        # row index per atom
    states: tuple | None = field(default=None, repr=False, compare=False)
