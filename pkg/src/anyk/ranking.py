"""Ranking algebra: selective commutative dioids.

A dioid is described by its two operations, their neutral elements and a
``key`` function embedding the induced total order into Python's native
ordering (``a`` is preferred over ``b`` iff ``key(a) <= key(b)``).  The key is
what heaps and sorts use; ``prefer`` is derived from it.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

INF = math.inf


class Monotonicity(enum.Enum):
    SUBSET = "SubsetMonotone"
    STRONG = "StrongSubsetMonotone"


def _identity(x):
    return x


@dataclass(frozen=True)
class SelectiveDioid:
    name: str
    combine: Callable[[Any, Any], Any]
    zero: Any
    one: Any
    monotonicity_class: Monotonicity
    has_inverse: bool = False
    key: Callable[[Any], Any] = _identity
    # optional override, used only to build intentionally broken dioids
    prefer_op: Callable[[Any, Any], Any] | None = field(default=None, compare=False)

    def prefer(self, a, b):
        if self.prefer_op is not None:
            return self.prefer_op(a, b)
        return a if self.key(a) <= self.key(b) else b

    def precedes(self, a, b) -> bool:
        """a ⪯ b"""
        return self.key(a) <= self.key(b)

    def combine_all(self, items: Iterable) -> Any:
        acc = self.one
        for x in items:
            acc = self.combine(acc, x)
        return acc

    def prefer_all(self, items: Iterable) -> Any:
        acc = self.zero
        for x in items:
            acc = self.prefer(acc, x)
        return acc

    @property
    def is_strong(self) -> bool:
        return self.monotonicity_class is Monotonicity.STRONG


def combine(d: SelectiveDioid, a, b):
    return d.combine(a, b)


def prefer(d: SelectiveDioid, a, b):
    return d.prefer(a, b)


def _add(a, b):
    return a + b


def _max(a, b):
    return a if a >= b else b


TROPICAL = SelectiveDioid(
    name="sum", combine=_add, zero=INF, one=0, has_inverse=True,
    monotonicity_class=Monotonicity.STRONG,
)

MINMAX = SelectiveDioid(
    name="max", combine=_max, zero=INF, one=-INF,
    monotonicity_class=Monotonicity.STRONG,
)


def _prod(a, b):
    # inf is the zero element and absorbs everything, including 0
    if a == INF or b == INF:
        return INF
    return a * b


PRODUCT = SelectiveDioid(
    name="prod", combine=_prod, zero=INF, one=1,
    monotonicity_class=Monotonicity.SUBSET,
)


def lexicographic(dim: int) -> SelectiveDioid:
    """Fixed-length real vectors, summed componentwise, compared lexicographically.

    The all-infinite vector acts as the zero element.
    """
    if dim < 1:
        raise ValueError("lexicographic dioid needs dim >= 1")
    zero = (INF,) * dim

    def comb(a, b):
        return tuple(x + y for x, y in zip(a, b))

    return SelectiveDioid(
        name=f"lex{dim}", combine=comb, zero=zero, one=(0,) * dim,
        has_inverse=True, monotonicity_class=Monotonicity.STRONG,
    )


def make_dioid(name: str, dim: int = 2) -> SelectiveDioid:
    if name == "sum":
        return TROPICAL
    if name == "max":
        return MINMAX
    if name == "prod":
        return PRODUCT
    if name == "lex":
        return lexicographic(dim)
    raise ValueError(f"unknown ranking {name!r}")


def strong_monotonicity_violations(d: SelectiveDioid, samples: Sequence) -> list[tuple]:
    """Quadruples (x1, x2, y1, y2) breaking strong subset-monotonicity.

    The property: x1 ⪯ x2 and x1⊗y1 ⪯ x1⊗y2 imply x2⊗y1 ⪯ x2⊗y2.
    """
    out = []
    pre = d.precedes
    for x1, x2, y1, y2 in itertools.product(samples, repeat=4):
        if not pre(x1, x2):
            continue
        if pre(d.combine(x1, y1), d.combine(x1, y2)) and not pre(d.combine(x2, y1), d.combine(x2, y2)):
            out.append((x1, x2, y1, y2))
    return out


def check_dioid_laws(d: SelectiveDioid, samples: Sequence, strong: bool | None = None) -> list[str]:
    """Evaluate the dioid axioms over all pairs and triples of ``samples``.

    Returns the sorted names of violated laws.  Strong subset-monotonicity is
    checked over quadruples when ``strong`` is true (default: when the dioid
    declares it).
    """
    if not samples:
        raise ValueError("samples must be non-empty")
    if strong is None:
        strong = d.is_strong
    bad: set[str] = set()
    c, p, key = d.combine, d.prefer, d.key
    for a in samples:
        if p(a, a) != a:
            bad.add("prefer_idempotence")
        if c(a, d.zero) != d.zero:
            bad.add("zero_absorbing")
        if p(a, d.zero) != a or p(d.zero, a) != a:
            bad.add("zero_neutral")
        if c(a, d.one) != a:
            bad.add("one_neutral")
    for a, b in itertools.product(samples, repeat=2):
        r = p(a, b)
        if r != a and r != b:
            bad.add("selectivity")
        if p(a, b) != p(b, a):
            bad.add("prefer_commutativity")
        if c(a, b) != c(b, a):
            bad.add("combine_commutativity")
        # key must realise the order that prefer induces
        if (p(a, b) == a) != (key(a) <= key(b)) and a != b:
            bad.add("total_order")
    for a, b, x in itertools.product(samples, repeat=3):
        if p(p(a, b), x) != p(a, p(b, x)):
            bad.add("prefer_associativity")
        if c(c(a, b), x) != c(a, c(b, x)):
            bad.add("combine_associativity")
        if c(p(a, b), x) != p(c(a, x), c(b, x)):
            bad.add("distributivity")
        if key(a) <= key(b) and not key(c(a, x)) <= key(c(b, x)):
            bad.add("order_monotonicity")
        # transitivity of the induced order
        if p(a, b) == a and p(b, x) == b and p(a, x) != a:
            bad.add("total_order")
    if strong and strong_monotonicity_violations(d, samples):
        bad.add("strong_subset_monotonicity")
    return sorted(bad)
