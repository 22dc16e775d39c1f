"""T-DP instances: stage tree, states, weighted decisions, bottom-up phase.

Layout of an instance with ``m`` non-terminal stages besides the source:

* stage 0 is the source ``s`` with a single state 0;
* stages 1..m are relation and intermediate stages in BFS order of the stage
  tree (an intermediate stage sits between every parent/child relation pair
  and holds one state per join key);
* terminal stages follow.  Their edge weights are kept per parent state in
  ``terminal_weight`` and folded into ``leaf`` during the bottom-up phase.

``adj[c][u]`` lists the states of stage ``c`` reachable from state ``u`` of
the parent stage.  Every edge into state ``v`` of stage ``c`` carries
``weight[c][v]``: the tuple weight for relation stages, 1̄ for intermediates.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .answers import RankedAnswer
from .database import Database
from .query import JoinTree, select_rows
from .ranking import SelectiveDioid

SOURCE = "source"
RELATION = "relation"
INTERMEDIATE = "intermediate"
TERMINAL = "terminal"


class EmptyResult(LookupError):
    pass


@dataclass
class Stage:
    index: int
    kind: str
    parent: int | None
    children: list = field(default_factory=list)
    atom: int | None = None          # join-tree node for relation stages
    key_vars: tuple = ()             # join variables for intermediate stages
    level: int = 0                   # join-tree level (root relation = 1)
    sdepth: int = 0                  # depth in the stage tree


class TdpInstance:
    def __init__(self, dioid: SelectiveDioid, tree: JoinTree | None, stages: list,
                 answer_vars: tuple, db: Database | None = None):
        self.dioid = dioid
        self.tree = tree
        self.stages = stages
        self.answer_vars = tuple(answer_vars)
        self.db = db
        self.m = sum(1 for s in stages if s.kind in (RELATION, INTERMEDIATE))
        k = len(stages)
        self.parent = [s.parent for s in stages]
        self.labels: list = [None] * k     # row index / key tuple per state
        self.values: list = [None] * k     # variable values per relation state
        self.weight: list = [None] * k
        self.adj: list = [None] * k
        self.terminal_weight: list = [None] * k
        self.leaf: list = [None] * k
        self.pi1: list = [None] * k
        # w(v) ⊗ π1(v) per state and its sort key; what a parent ranks children by
        self.down: list = [None] * k
        self.down_key: list = [None] * k
        self.best: list = [None] * k
        self.pruned: list = [None] * k
        self.ready = False
        self.witness_atoms = 0             # number of base atoms in the witness
        self._answer_plan = None

    # ------------------------------------------------------------ structure
    def nstates(self, c: int) -> int:
        return len(self.weight[c]) if self.weight[c] is not None else 1

    def child_stages(self, c: int) -> list:
        return [x for x in self.stages[c].children if self.stages[x].kind != TERMINAL]

    def terminal_stages(self, c: int) -> list:
        return [x for x in self.stages[c].children if self.stages[x].kind == TERMINAL]

    def state_count(self, include_pruned: bool = False) -> int:
        """States in stages 0..m (terminals excluded)."""
        tot = 0
        for c in range(self.m + 1):
            if include_pruned or self.pruned[c] is None:
                tot += self.nstates(c)
            else:
                tot += sum(1 for p in self.pruned[c] if not p)
        return tot

    def edge_count(self) -> int:
        tot = 0
        for c in range(1, self.m + 1):
            tot += sum(len(a) for a in self.adj[c])
        for c in range(len(self.stages)):
            if self.stages[c].kind == TERMINAL:
                tot += len(self.terminal_weight[c])
        return tot

    @property
    def empty(self) -> bool:
        return self.pruned[0][0]

    # ------------------------------------------------------------ answers
    def _plan(self):
        """Per relation stage: (stage, variables, witness slot or -1, source rows)."""
        plan = []
        for c in range(1, self.m + 1):
            st = self.stages[c]
            if st.kind != RELATION:
                continue
            atom = self.tree.atoms[st.atom]
            slot = st.atom if (not atom.is_projection and st.atom < self.witness_atoms) else -1
            rows = self.db.get(atom.relation).rows if slot >= 0 else None
            plan.append((c, atom.variables, slot, rows))
        self._answer_plan = plan
        return plan

    def make_answer(self, rank: int, weight, sol) -> RankedAnswer:
        plan = self._answer_plan or self._plan()
        assignment = {}
        n = self.witness_atoms
        wit = [None] * n
        rows = [None] * n
        values, labels = self.values, self.labels
        for c, variables, slot, src in plan:
            v = sol[c]
            assignment.update(zip(variables, values[c][v]))
            if slot >= 0:
                r = labels[c][v]
                rows[slot] = r
                wit[slot] = src[r]
        assignment = {v: assignment[v] for v in self.answer_vars}
        if not n:
            return RankedAnswer(rank, weight, assignment, None, None, tuple(sol))
        return RankedAnswer(rank, weight, assignment, tuple(wit), tuple(rows), tuple(sol))

    def witness_rows(self, sol) -> tuple:
        """Row index per base atom."""
        out = [None] * self.witness_atoms
        for c in range(1, self.m + 1):
            st = self.stages[c]
            if st.kind == RELATION and st.atom < self.witness_atoms:
                out[st.atom] = self.labels[c][sol[c]]
        return tuple(out)

    def solution_weight(self, sol):
        """Aggregate weight of a full solution, recomputed from scratch."""
        d = self.dioid
        w = self.leaf[0][0]
        for c in range(1, self.m + 1):
            v = sol[c]
            w = d.combine(w, d.combine(self.weight[c][v], self.leaf[c][v]))
        return w

    def dump_edges(self, out) -> None:
        """Write ``stage parent_state child_state weight`` lines."""
        for c in range(1, self.m + 1):
            for u, lst in enumerate(self.adj[c]):
                for v in lst:
                    out.write(f"{c} {u} {v} {self.weight[c][v]}\n")
        for c, st in enumerate(self.stages):
            if st.kind == TERMINAL:
                for u, w in enumerate(self.terminal_weight[c]):
                    out.write(f"{c} {u} 0 {w}\n")


def build_stage_tree(tree: JoinTree) -> list:
    """Stages in BFS order of the stage tree, terminals appended last."""
    stages = [Stage(0, SOURCE, None, level=0, sdepth=0)]
    leaves = []
    depth = {tree.root: 1}
    # queue items: (kind, atom, parent stage)
    q = deque([(RELATION, tree.root, 0)])
    while q:
        kind, a, p = q.popleft()
        idx = len(stages)
        if kind == RELATION:
            st = Stage(idx, RELATION, p, atom=a, level=depth[a])
        else:
            st = Stage(idx, INTERMEDIATE, p, atom=None, key_vars=tree.shared_vars(a), level=depth[a])
        st.sdepth = stages[p].sdepth + 1
        stages.append(st)
        stages[p].children.append(idx)
        if kind == RELATION:
            if not tree.children[a]:
                leaves.append(idx)
            for ch in tree.children[a]:
                depth[ch] = depth[a] + 1
                q.append((INTERMEDIATE, ch, idx))
        else:
            q.append((RELATION, a, idx))
    for p in leaves:
        idx = len(stages)
        stages.append(Stage(idx, TERMINAL, p, level=stages[p].level, sdepth=stages[p].sdepth + 1))
        stages[p].children.append(idx)
    return stages


def _materialize(atom, db: Database, one):
    rel = db.get(atom.relation, atom.arity)
    if atom.is_projection:
        seen = {}
        for _, vals in select_rows(atom, rel.rows):
            if vals not in seen:
                seen[vals] = len(seen)
        vals = list(seen)
        return [None] * len(vals), vals, [one] * len(vals)
    labels, vals, ws = [], [], []
    rw = rel.weights
    for i, v in select_rows(atom, rel.rows):
        labels.append(i)
        vals.append(v)
        ws.append(rw[i])
    return labels, vals, ws


def build_tdp(t: JoinTree, db: Database, d: SelectiveDioid, answer_vars=None) -> TdpInstance:
    """Encode a join tree over a database as a T-DP instance (not yet annotated)."""
    stages = build_stage_tree(t)
    if answer_vars is None:
        answer_vars = []
        for a in t.atoms:
            for v in a.variables:
                if v not in answer_vars:
                    answer_vars.append(v)
    inst = TdpInstance(d, t, stages, tuple(answer_vars), db)
    inst.witness_atoms = sum(1 for a in t.atoms if not a.is_projection)
    one = d.one
    inst.labels[0], inst.weight[0] = [None], [one]
    # relation stages first, then intermediates keyed on the child's tuples
    for st in stages:
        if st.kind == RELATION:
            labels, vals, ws = _materialize(t.atoms[st.atom], db, one)
            inst.labels[st.index], inst.values[st.index], inst.weight[st.index] = labels, vals, ws
    for st in stages:
        c = st.index
        if st.kind == INTERMEDIATE:
            (r,) = st.children
            catom = t.atoms[stages[r].atom]
            patom = t.atoms[stages[st.parent].atom]
            cpos = [catom.variables.index(v) for v in st.key_vars]
            ppos = [patom.variables.index(v) for v in st.key_vars]
            ids: dict = {}
            groups = []
            for v, vals in enumerate(inst.values[r]):
                k = tuple(vals[i] for i in cpos)
                j = ids.get(k)
                if j is None:
                    j = ids[k] = len(groups)
                    groups.append([])
                groups[j].append(v)
            inst.labels[c] = list(ids)
            inst.weight[c] = [one] * len(groups)
            inst.adj[r] = groups
            adj = []
            for vals in inst.values[st.parent]:
                j = ids.get(tuple(vals[i] for i in ppos))
                adj.append([] if j is None else [j])
            inst.adj[c] = adj
        elif st.kind == TERMINAL:
            inst.terminal_weight[c] = [one] * len(inst.weight[st.parent])
    inst.adj[1] = [list(range(len(inst.weight[1])))]
    return inst


def bottom_up(inst: TdpInstance, d: SelectiveDioid | None = None) -> TdpInstance:
    """Compute π1, prune dead ends and set best-child pointers, deepest stage first."""
    d = d or inst.dioid
    comb, key, zero, one = d.combine, d.key, d.zero, d.one
    stages = inst.stages
    for c in range(inst.m, -1, -1):
        nc = inst.nstates(c)
        leaf = [one] * nc
        for tstage in inst.terminal_stages(c):
            tw = inst.terminal_weight[tstage]
            leaf = [comb(a, b) for a, b in zip(leaf, tw)]
        inst.leaf[c] = leaf
        pi = list(leaf)
        pruned = [False] * nc
        for ch in inst.child_stages(c):
            cdown, ckey, cpr = inst.down[ch], inst.down_key[ch], inst.pruned[ch]
            adj = inst.adj[ch]
            best = [-1] * nc
            for u in range(nc):
                lst = adj[u]
                if pruned[u]:
                    adj[u] = []
                    continue
                lst = [v for v in lst if not cpr[v]]
                adj[u] = lst
                if not lst:
                    pruned[u] = True
                    pi[u] = zero
                    continue
                bv = min(lst, key=ckey.__getitem__)
                best[u] = bv
                pi[u] = comb(pi[u], cdown[bv])
            inst.best[ch] = best
        # pruned states lose the rest of their edges too
        for ch in inst.child_stages(c):
            adj = inst.adj[ch]
            for u in range(nc):
                if pruned[u]:
                    adj[u] = []
                    inst.best[ch][u] = -1
        inst.pi1[c] = pi
        inst.pruned[c] = pruned
        if c:
            down = inst.down[c] = [comb(w, p) for w, p in zip(inst.weight[c], pi)]
            inst.down_key[c] = [key(x) for x in down]
    for c, st in enumerate(stages):
        if st.kind == TERMINAL:
            inst.pi1[c] = [one]
            inst.pruned[c] = [False]
    if inst.tree is not None and inst.m:
        inst._plan()
    inst.ready = True
    return inst


def top1_states(inst: TdpInstance) -> list:
    if not inst.ready:
        raise RuntimeError("bottom_up has not run")
    if inst.empty:
        raise EmptyResult("query has no answers")
    sol = [0] * (inst.m + 1)
    par, best = inst.parent, inst.best
    for c in range(1, inst.m + 1):
        sol[c] = best[c][sol[par[c]]]
    return sol


def top1_solution(inst: TdpInstance) -> RankedAnswer:
    sol = top1_states(inst)
    return inst.make_answer(1, inst.pi1[0][0], sol)


def prepare(t: JoinTree, db: Database, d: SelectiveDioid, answer_vars=None) -> TdpInstance:
    return bottom_up(build_tdp(t, db, d, answer_vars), d)
