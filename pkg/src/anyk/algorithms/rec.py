"""Recursive enumeration: every state memoises its ranked branch solutions."""

from __future__ import annotations

import heapq

from ..dpgraph import TdpInstance
from .common import AnykIterator, require_ready


class _Branch:
    """Ranked solutions from one state toward one child stage.

    ``sols[k] = (weight, child state, ranks per grandchild stage)``.  A state
    with a single child that itself has a single child stage needs no queue:
    its list mirrors the child's list.
    """

    __slots__ = ("sols", "heap", "mirror")

    def __init__(self):
        self.sols = []
        self.heap = None
        self.mirror = None


class RecIterator(AnykIterator):
    def __init__(self, inst: TdpInstance):
        super().__init__(inst)
        require_ready(inst)
        self.d = inst.dioid
        m = inst.m
        self.kids = [inst.child_stages(c) for c in range(m + 1)]
        self.tables = [None] + [[None] * len(inst.adj[c]) for c in range(1, m + 1)]
        self.seq = 0
        self.sol = [0] * (m + 1)

    def _own(self, c, v):
        """w(v) ⊗ leaf(v) for state v of stage c."""
        inst = self.inst
        return self.d.combine(inst.weight[c][v], inst.leaf[c][v])

    def _branch(self, c, u):
        br = self.tables[c][u]
        if br is not None:
            return br
        inst = self.inst
        br = self.tables[c][u] = _Branch()
        children = inst.adj[c][u]
        kids = self.kids[c]
        if len(children) == 1 and len(kids) <= 1:
            br.mirror = children[0]
            return br
        D, K = inst.down[c], inst.down_key[c]
        zeros = (0,) * len(kids)
        h = []
        for v in children:
            self.seq += 1
            h.append((K[v], self.seq, v, zeros, 0, D[v]))
        heapq.heapify(h)
        st = self.stats
        st.init_inserts += len(h)
        st.pq_cost += len(h)
        if len(h) > st.max_pq_size:
            st.max_pq_size = len(h)
        br.heap = h
        return br

    def get(self, c, u, k):
        """k-th best (0-based) branch solution of state u toward stage c, or None."""
        br = self._branch(c, u)
        sols = br.sols
        while len(sols) <= k:
            if br.mirror is not None:
                if not self._advance_mirror(c, br):
                    return None
            elif not self._advance(c, br):
                return None
        return sols[k]

    def _advance_mirror(self, c, br):
        v = br.mirror
        kids = self.kids[c]
        k = len(br.sols)
        if not kids:
            if k:
                return False
            br.sols.append((self._own(c, v), v, ()))
            return True
        sub = self.get(kids[0], v, k)
        if sub is None:
            return False
        br.sols.append((self.d.combine(self._own(c, v), sub[0]), v, (k,)))
        return True

    def _advance(self, c, br):
        h = br.heap
        if not h:
            return False
        st = self.stats
        st.pq_pops += 1
        st.pq_cost += len(h).bit_length()
        _, _, v, ranks, dev, wv = heapq.heappop(h)
        br.sols.append((wv, v, ranks))
        kids = self.kids[c]
        if not kids:
            return True
        d = self.d
        comb, key = d.combine, d.key
        own = self._own(c, v)
        for q in range(dev, len(kids)):
            nr = ranks[:q] + (ranks[q] + 1,) + ranks[q + 1:]
            if self.get(kids[q], v, nr[q]) is None:
                continue
            w = own
            for cq, r in zip(kids, nr):
                w = comb(w, self.get(cq, v, r)[0])
            self.seq += 1
            heapq.heappush(h, (key(w), self.seq, v, nr, q, w))
            st.pq_pushes += 1
            n = len(h)
            st.pq_cost += n.bit_length()
            if n > st.max_pq_size:
                st.max_pq_size = n
        return True

    def _fill(self, c, u, k):
        _, v, ranks = self.get(c, u, k)
        self.sol[c] = v
        for cq, r in zip(self.kids[c], ranks):
            self._fill(cq, v, r)

    def _next(self):
        inst = self.inst
        if inst.empty:
            return None
        k = self.rank
        top = self.get(1, 0, k)
        if top is None:
            return None
        self._fill(1, 0, k)
        self.rank += 1
        w = self.d.combine(inst.leaf[0][0], top[0])
        return inst.make_answer(self.rank, w, self.sol)
