"""Successor functions: ranked access to the children of a state.

Children ``v`` of a parent state in stage ``c`` are ordered by
``(key(w(v) ⊗ π1(v)), v)``; ``get(r)`` returns the child of rank ``r``
(0-based) or ``None``.  Three strategies share this interface and return
identical answers.
"""

from __future__ import annotations

import heapq


class EagerOrder:
    __slots__ = ("items",)

    def __init__(self, keyed):
        keyed.sort()
        self.items = [v for _, v in keyed]

    def get(self, r):
        items = self.items
        return items[r] if r < len(items) else None


class LazyOrder:
    """Binary heap plus the sorted prefix popped so far."""

    __slots__ = ("heap", "done")

    def __init__(self, keyed):
        heapq.heapify(keyed)
        self.heap = keyed
        self.done = []
        # best and second-best are ready before the first successor call
        for _ in range(2):
            if keyed:
                self.done.append(heapq.heappop(keyed)[1])

    def get(self, r):
        done, heap = self.done, self.heap
        while len(done) <= r and heap:
            done.append(heapq.heappop(heap)[1])
        return done[r] if r < len(done) else None


class QuickOrder:
    """Incremental quicksort: the r-th element is settled on demand.

    ``stack`` holds pivot positions; everything left of the top one is
    unsorted but smaller than everything from it on.  Segments of at most
    ``CUTOFF`` elements are sorted outright.
    """

    __slots__ = ("a", "stack", "done", "sorted_upto")
    CUTOFF = 16

    def __init__(self, keyed):
        self.a = keyed
        self.stack = [len(keyed)]
        self.done = []
        self.sorted_upto = 0

    def _next(self):
        a, stack = self.a, self.stack
        idx = len(self.done)
        if idx >= len(a):
            return None
        if idx < self.sorted_upto:
            return a[idx][1]
        while True:
            top = stack[-1]
            if top == idx:
                stack.pop()
                return a[idx][1]
            if top - idx <= self.CUTOFF:
                a[idx:top] = sorted(a[idx:top])
                self.sorted_upto = top
                return a[idx][1]
            stack.append(_partition(a, idx, top - 1, _median3(a, idx, top - 1)))

    def get(self, r):
        done = self.done
        while len(done) <= r:
            v = self._next()
            if v is None:
                return None
            done.append(v)
        return done[r]


def _median3(a, lo, hi):
    mid = (lo + hi) >> 1
    x, y, z = a[lo], a[mid], a[hi]
    if x < y:
        if y < z:
            return mid
        return hi if x < z else lo
    if x < z:
        return lo
    return hi if y < z else mid


def _partition(a, lo, hi, p):
    """Partition a[lo..hi] around a[p]; returns the pivot's final index.

    Keys are distinct (ties are broken by state id), so two passes suffice.
    """
    pivot = a[p]
    seg = a[lo:hi + 1]
    left = [x for x in seg if x < pivot]
    right = [x for x in seg if x > pivot]
    k = lo + len(left)
    a[lo:hi + 1] = left + [pivot] + right
    return k


VARIANTS = {"eager": EagerOrder, "lazy": LazyOrder, "quick": QuickOrder}


class SuccessorTable:
    """Per (stage, parent state) order objects, created on first use.

    The eager variant builds every order up front.
    """

    def __init__(self, inst, variant: str = "quick"):
        try:
            self.cls = VARIANTS[variant.lower()]
        except KeyError:
            raise ValueError(f"unknown successor variant {variant!r}") from None
        self.inst = inst
        self.variant = variant.lower()
        self.tables = [None] * (inst.m + 1)
        for c in range(1, inst.m + 1):
            self.tables[c] = [None] * len(inst.adj[c])
        if self.variant == "eager":
            for c in range(1, inst.m + 1):
                for u in range(len(inst.adj[c])):
                    if inst.adj[c][u]:
                        self._make(c, u)

    def _make(self, c, u):
        kk = self.inst.down_key[c]
        o = self.cls([(kk[v], v) for v in self.inst.adj[c][u]])
        self.tables[c][u] = o
        return o

    def get(self, c, u, r):
        o = self.tables[c][u]
        if o is None:
            o = self._make(c, u)
        return o.get(r)
