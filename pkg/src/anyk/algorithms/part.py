"""Lawler-Murty partitioning over a T-DP instance, and the PART+ refinement."""

from __future__ import annotations

from ..dpgraph import TdpInstance
from .common import AnykIterator, ConfigError, CountingHeap, require_ready
from .successors import SuccessorTable

# A candidate prefix is a chain of immutable nodes (prev, position, state, rank)
# so that prefixes are shared, never copied.


class _Layout:
    """Static per-instance data for deviation priorities.

    Stages are grouped by stage-tree depth.  For position ``j`` the positions
    still expanded optimally whose parent lies before ``j`` are the rest of
    j's level plus a prefix of the next level ending at ``front_end[j]``.
    """

    def __init__(self, inst: TdpInstance):
        m = inst.m
        sd = [inst.stages[c].sdepth for c in range(m + 1)]
        par = inst.parent
        self.same_next = [False] * (m + 2)
        self.level_start = [False] * (m + 1)
        for c in range(1, m + 1):
            self.same_next[c] = c + 1 <= m and sd[c + 1] == sd[c]
            self.level_start[c] = c == 1 or sd[c - 1] != sd[c]
        self.front_end = [-1] * (m + 1)
        for j in range(1, m + 1):
            end = -1
            for c in range(j + 1, m + 1):
                if sd[c] == sd[j] + 1 and par[c] < j:
                    end = c
            self.front_end[j] = end


class PartIterator(AnykIterator):
    def __init__(self, inst: TdpInstance, variant: str = "quick", audit: bool = False):
        super().__init__(inst)
        require_ready(inst)
        self.d = inst.dioid
        self.variant = variant
        self.succ = SuccessorTable(inst, variant)
        self.layout = _Layout(inst)
        self.heap = CountingHeap(self.stats)
        self.audit = [] if audit else None
        m = inst.m
        self.sol = [0] * (m + 1)
        self.ranks = [0] * (m + 1)
        self.chain = [None] * (m + 1)
        one = self.d.one
        self.A = [one] * (m + 1)
        self.B = [one] * (m + 1)
        self.g = [one] * (m + 2)
        self.suf = [one] * (m + 2)
        self.pre = [one] * (m + 1)
        if not inst.empty:
            top = inst.pi1[0][0]
            v = inst.best[1][0]
            a1 = self.d.combine(inst.leaf[0][0], self.d.combine(inst.weight[1][v], inst.leaf[1][v]))
            first = (None, 1, v, 0, a1)
            self.heap.push(self.d.key(top), ("dev", first, top, 0, 0))

    # -------------------------------------------------------------- helpers
    def _load(self, node):
        """Fill sol/ranks/chain from a prefix chain and expand it optimally."""
        inst = self.inst
        sol, ranks, chain = self.sol, self.ranks, self.chain
        i = node[1]
        n = node
        while n is not None:
            p = n[1]
            chain[p] = n
            sol[p] = n[2]
            ranks[p] = n[3]
            n = n[0]
        best, par = inst.best, inst.parent
        for c in range(i + 1, inst.m + 1):
            sol[c] = best[c][sol[par[c]]]
            ranks[c] = 0
            chain[c] = None
        return i

    def _aggregates(self, i):
        """Prefix products A and frontier products B(j) for positions j >= i.

        A[c] aggregates w⊗leaf up to c; B(j) aggregates w⊗π1 over the stages
        after j whose parent precedes j (rest of j's level, then a prefix of
        the next level), from per-level prefix/suffix products.
        """
        inst, d = self.inst, self.d
        comb, one = d.combine, d.one
        m = inst.m
        sol = self.sol
        W, P, L = inst.weight, inst.pi1, inst.leaf
        A, B, g = self.A, self.B, self.g
        prev = self.chain[i][0]
        acc = A[i - 1] = prev[4] if prev is not None else L[0][0]
        for c in range(i, m + 1):
            v = sol[c]
            wv = W[c][v]
            g[c] = comb(wv, P[c][v])
            acc = comb(acc, comb(wv, L[c][v]))
            A[c] = acc
        lay = self.layout
        same_next, level_start, front_end = lay.same_next, lay.level_start, lay.front_end
        suf, pre = self.suf, self.pre
        for c in range(m, i, -1):
            suf[c] = comb(g[c], suf[c + 1]) if same_next[c] else g[c]
        # entries of pre left of i inside i's level are stale but never read:
        # frontier prefixes always lie in the level after j >= i
        for c in range(i + 1, m + 1):
            pre[c] = g[c] if level_start[c] else comb(pre[c - 1], g[c])
        for j in range(i, m + 1):
            b = suf[j + 1] if same_next[j] else one
            fe = front_end[j]
            if fe >= 0:
                b = comb(b, pre[fe])
            B[j] = b

    def _node(self, c):
        """Chain node for position c of the current solution, created on demand."""
        chain = self.chain
        n = chain[c]
        if n is None:
            prev = self._node(c - 1) if c > 1 else None
            n = chain[c] = (prev, c, self.sol[c], self.ranks[c], self.A[c])
        return n

    def _deviate(self, lo, hi, rank):
        inst, d = self.inst, self.d
        comb, key = d.combine, d.key
        sol, ranks, par = self.sol, self.ranks, inst.parent
        W, P, L = inst.weight, inst.pi1, inst.leaf
        A, B = self.A, self.B
        st, succ, heap = self.stats, self.succ, self.heap
        for j in range(lo, hi + 1):
            st.succ_calls += 1
            r = ranks[j] + 1
            v = succ.get(j, sol[par[j]], r)
            if v is None:
                continue
            wv = W[j][v]
            a = A[j - 1]
            prio = comb(comb(a, comb(wv, P[j][v])), B[j])
            prev = self._node(j - 1) if j > 1 else None
            node = (prev, j, v, r, comb(a, comb(wv, L[j][v])))
            heap.push(key(prio), ("dev", node, prio, rank, j))

    def _emit(self, weight, origin, pos):
        self.rank += 1
        if self.audit is not None:
            self.audit.append((self.rank, origin, pos))
        return self.inst.make_answer(self.rank, weight, self.sol)

    def _next(self):
        if not self.heap:
            return None
        _, _, (_, node, weight, origin, pos) = self.heap.pop()
        i = self._load(node)
        self._aggregates(i)
        self._deviate(i, self.inst.m, self.rank + 1)
        return self._emit(weight, origin, pos)


class _SuffixList:
    __slots__ = ("suffixes", "subscribers")

    def __init__(self):
        self.suffixes = []      # (states after the vertex end, suffix weight)
        self.subscribers = []   # (prefix node, awaited rank, prefix weight)


class PartPlusIterator(PartIterator):
    """PART with memoised suffix lists per decomposition-vertex key.

    ``vertex_ends`` are the last positions of the serial-decomposition
    vertices; the key of a vertex is the tuple of its states.  Requires a
    strong subset-monotone dioid.
    """

    def __init__(self, inst: TdpInstance, variant: str = "quick", decomposition=None,
                 audit: bool = False):
        if not inst.dioid.is_strong:
            raise ConfigError(
                f"PART+ requires a StrongSubsetMonotone dioid; {inst.dioid.name!r} is "
                f"{inst.dioid.monotonicity_class.value}")
        super().__init__(inst, variant, audit)
        self.vertices = stage_vertices(inst, decomposition)
        m = inst.m
        # vertex ends before the last vertex; the last one has an empty suffix
        self.ends = [v[-1] for v in self.vertices[:-1]]
        self.start_of = {v[-1]: v[0] for v in self.vertices}
        self.stores: dict = {}
        self.subscriber_count = 0
        self.max_store_keys = 0

    def _key(self, e):
        s = self.start_of[e]
        return (e, tuple(self.sol[s:e + 1]))

    def _suffix_weights(self, upto):
        """S[e] = ⊗ of w⊗leaf over positions e+1..upto, computed right to left."""
        inst, d = self.inst, self.d
        comb, one = d.combine, d.one
        W, L, sol = inst.weight, inst.leaf, self.sol
        S = [one] * (upto + 1)
        acc = one
        for c in range(upto, 0, -1):
            S[c] = acc
            v = sol[c]
            acc = comb(comb(W[c][v], L[c][v]), acc)
        S[0] = acc
        return S

    def _store(self, limit, upto, tail_weight):
        """Append this solution's suffixes to every vertex key before ``limit``.

        Suffix weights aggregate positions up to ``upto`` then ``tail_weight``.
        """
        d = self.d
        S = self._suffix_weights(upto)
        sol = self.sol
        for e in self.ends:
            if e >= limit:
                break
            k = self._key(e)
            lst = self.stores.get(k)
            if lst is None:
                lst = self.stores[k] = _SuffixList()
            w = d.combine(S[e], tail_weight)
            lst.suffixes.append((tuple(sol[e + 1:]), w))
            if lst.subscribers:
                r = len(lst.suffixes) - 1
                for prefix, want, wpre in lst.subscribers:
                    assert want == r
                    self._push_follower(prefix, k, r, wpre, w)
                lst.subscribers = []
        if len(self.stores) > self.max_store_keys:
            self.max_store_keys = len(self.stores)

    def _push_follower(self, prefix, k, r, wpre, wsuf):
        prio = self.d.combine(wpre, wsuf)
        self.heap.push(self.d.key(prio), ("fol", prefix, prio, k, r))

    def _follow(self, prefix, k, r, wpre):
        lst = self.stores[k]
        if r < len(lst.suffixes):
            self._push_follower(prefix, k, r, wpre, lst.suffixes[r][1])
        else:
            lst.subscribers.append((prefix, r, wpre))
            self.subscriber_count += 1

    def _next(self):
        if not self.heap:
            return None
        _, _, entry = self.heap.pop()
        m = self.inst.m
        if entry[0] == "fol":
            _, prefix, weight, k, r = entry
            e = k[0]
            self._load(prefix)
            states = self.stores[k].suffixes[r][0]
            self.sol[e + 1:] = states
            self.ranks[e + 1:] = [0] * (m - e)
            for c in range(e + 1, m + 1):
                self.chain[c] = None
            wpre = prefix[4]
            self._follow(prefix, k, r + 1, wpre)
            self._store(e, e, self.stores[k].suffixes[r][1])
            return self._emit(weight, None, e)
        _, node, weight, origin, pos = entry
        i = self._load(node)
        self._aggregates(i)
        M = m
        for e in self.ends:
            if e >= i and self._key(e) in self.stores:
                M = e
                break
        self._deviate(i, M, self.rank + 1)
        if M < m:
            self._follow(self._node(M), self._key(M), 1, self.A[M])
        self._store(M, m, self.d.one)
        return self._emit(weight, origin, pos)


def stage_vertices(inst: TdpInstance, decomposition=None) -> list:
    """Serial-decomposition vertices as lists of stage positions 1..m.

    The default groups stages by join-tree level: a vertex holds the
    intermediate stages entering that level followed by its relation stages.
    A supplied decomposition lists join-tree node indices per vertex.
    """
    m = inst.m
    if decomposition is None:
        groups: dict = {}
        for c in range(1, m + 1):
            groups.setdefault(inst.stages[c].level, []).append(c)
        verts = [groups[k] for k in sorted(groups)]
    else:
        node_stage = {}
        for c in range(1, m + 1):
            st = inst.stages[c]
            if st.kind == "relation":
                node_stage[st.atom] = c
        verts = []
        for vert in decomposition.vertices:
            rel = [node_stage[a] for a in vert]
            inter = [inst.parent[c] for c in rel if inst.parent[c] != 0]
            verts.append(sorted(inter + rel))
    _check_vertices(inst, verts)
    return verts


def _check_vertices(inst, verts):
    flat = [c for v in verts for c in v]
    if sorted(flat) != list(range(1, inst.m + 1)):
        raise ConfigError("decomposition must cover every stage exactly once")
    where = {}
    for i, v in enumerate(verts):
        if v != list(range(v[0], v[-1] + 1)):
            raise ConfigError("decomposition vertices must be contiguous in stage order")
        for c in v:
            where[c] = i
    for i in range(len(verts) - 1):
        if verts[i][-1] + 1 != verts[i + 1][0]:
            raise ConfigError("decomposition vertices out of stage order")
    for c in range(2, inst.m + 1):
        p = inst.parent[c]
        if p and where[c] - where[p] not in (0, 1):
            raise ConfigError("adjacent stages must share or neighbour a vertex")
