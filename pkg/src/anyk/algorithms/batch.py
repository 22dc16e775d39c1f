"""Batch baseline: materialise every solution of the pruned instance, then sort."""

from __future__ import annotations

import os
import sys
from array import array
from collections.abc import Sequence

import numpy as np

from ..dpgraph import RELATION, TdpInstance
from ..ranking import _identity

DEFAULT_CAP = 50_000_000


class OutputBudgetExceeded(RuntimeError):
    pass


def output_cap() -> int:
    v = os.environ.get("ANYK_OUTPUT_CAP")
    return int(v) if v else DEFAULT_CAP


class BatchResult(Sequence):
    """Sorted answers held column-wise; RankedAnswer objects are built on access."""

    def __init__(self, inst, weights, ids, order, rel_pos):
        self.inst = inst
        self.weights = weights
        self.ids = ids
        self.order = order
        self.rel_pos = rel_pos
        # integral inputs are reported as ints even though they were summed as floats
        self.int_weights = isinstance(weights, array) and all(
            isinstance(x, int) for c in rel_pos for x in inst.weight[c])

    def __len__(self):
        return len(self.order)

    def _answer(self, i):
        j = int(self.order[i])
        r = len(self.rel_pos)
        sol = [0] * (self.inst.m + 1)
        for q, p in enumerate(self.rel_pos):
            sol[p] = int(self.ids[j * r + q])
        w = self.weights[j]
        if self.int_weights and w.is_integer():
            w = int(w)
        return self.inst.make_answer(i + 1, w, sol)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self._answer(x) for x in range(*i.indices(len(self)))]
        if i < 0:
            i += len(self)
        if not 0 <= i < len(self):
            raise IndexError(i)
        return self._answer(i)


def materialize(inst: TdpInstance, cap: int | None = None):
    """Exhaustive traversal; returns (weights, flat relation-state ids, relation positions)."""
    cap = output_cap() if cap is None else cap
    d = inst.dioid
    comb = d.combine
    m = inst.m
    rel_pos = [c for c in range(1, m + 1) if inst.stages[c].kind == RELATION]
    numeric = d.key is _identity and all(
        isinstance(w, (int, float)) for c in range(1, m + 1) for w in inst.weight[c][:1])
    weights = array("d") if numeric else []
    ids = array("q")
    if inst.empty:
        return weights, ids, rel_pos
    W, L, adj, par = inst.weight, inst.leaf, inst.adj, inst.parent
    sol = [0] * (m + 1)
    before = [p for p in rel_pos if p < m]
    last_is_rel = rel_pos[-1] == m
    leaf_before = before if last_is_rel else rel_pos
    wappend, iextend, iappend = weights.append, ids.extend, ids.append
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * m + 100))

    def rec(c, acc):
        u = sol[par[c]]
        Wc, Lc = W[c], L[c]
        if c == m:
            pre = [sol[p] for p in leaf_before]
            for v in adj[c][u]:
                wappend(comb(acc, comb(Wc[v], Lc[v])))
                iextend(pre)
                if last_is_rel:
                    iappend(v)
            if len(weights) > cap:
                raise OutputBudgetExceeded(f"more than {cap} answers")
            return
        for v in adj[c][u]:
            sol[c] = v
            rec(c + 1, comb(acc, comb(Wc[v], Lc[v])))

    rec(1, L[0][0])
    return weights, ids, rel_pos


def batch_yannakakis_sort(inst: TdpInstance, cap: int | None = None) -> BatchResult:
    """All answers sorted by weight; ties broken by the states of the witness."""
    weights, ids, rel_pos = materialize(inst, cap)
    n = len(weights)
    r = len(rel_pos)
    if isinstance(weights, array):
        w = np.frombuffer(weights, dtype=np.float64) if n else np.zeros(0)
        cols = np.frombuffer(ids, dtype=np.int64).reshape(n, r) if n else np.zeros((0, r), np.int64)
        keys = [cols[:, q] for q in range(r - 1, -1, -1)] + [w]
        order = np.lexsort(keys) if n else np.zeros(0, np.int64)
    else:
        key = inst.dioid.key
        order = sorted(range(n), key=lambda j: (key(weights[j]), tuple(ids[j * r:(j + 1) * r])))
    return BatchResult(inst, weights, ids, order, rel_pos)
