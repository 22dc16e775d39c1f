"""Weighted relations."""

from __future__ import annotations

from dataclasses import dataclass, field


class MissingRelationError(KeyError):
    pass


class ArityError(ValueError):
    pass


@dataclass
class Relation:
    rows: list                      # tuples of constants
    weights: list                   # one weight per row
    arity: int | None = None

    def __post_init__(self):
        if len(self.rows) != len(self.weights):
            raise ValueError("rows and weights differ in length")
        if self.arity is None:
            self.arity = len(self.rows[0]) if self.rows else 0
        for r in self.rows:
            if len(r) != self.arity:
                raise ArityError(f"row {r!r} does not have arity {self.arity}")

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(zip(self.rows, self.weights))


@dataclass
class Database:
    relations: dict = field(default_factory=dict)

    def add(self, name: str, rows, weights=None, arity=None, one=0):
        rows = [tuple(r) for r in rows]
        if weights is None:
            weights = [one] * len(rows)
        self.relations[name] = Relation(rows, list(weights), arity)
        return self

    def get(self, name: str, arity: int | None = None) -> Relation:
        try:
            rel = self.relations[name]
        except KeyError:
            raise MissingRelationError(f"relation {name!r} not in database") from None
        if arity is not None and rel.rows and rel.arity != arity:
            raise ArityError(f"relation {name!r} has arity {rel.arity}, query uses {arity}")
        return rel

    def __getitem__(self, name):
        return self.get(name)

    def __contains__(self, name):
        return name in self.relations
