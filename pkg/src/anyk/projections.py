"""Projection semantics for non-full queries.

``allweights`` enumerates the full query and projects each answer.
``minweight`` rewrites a free-connex query: the full instance over the
extended join tree is annotated bottom-up, then only the stages of the
connected node set U are kept and every removed branch becomes a terminal
whose edge weight is the best weight that branch can contribute.
"""

from __future__ import annotations

from .algorithms import make_iterator
from .database import Database
from .dpgraph import (INTERMEDIATE, RELATION, SOURCE, TERMINAL, Stage, TdpInstance,
                      bottom_up, prepare)
from .query import ConjunctiveQuery, CyclicError, gyo_join_tree, gyo_reduce, is_free_connex
from .ranking import SelectiveDioid


class NotFreeConnexError(ValueError):
    def __init__(self, residue):
        super().__init__("query is not free-connex; GYO residue with the head atom: "
                         + ", ".join(residue))
        self.residue = list(residue)


def enumerate_all_weight(q: ConjunctiveQuery, db: Database, d: SelectiveDioid,
                         algo: str = "part", variant: str = "quick"):
    t = gyo_join_tree(q)
    inst = prepare(t, db, d, answer_vars=q.free_vars)
    return make_iterator(inst, algo, variant)


def rewrite_min_weight(q: ConjunctiveQuery, db: Database, d: SelectiveDioid) -> TdpInstance:
    """Annotated instance whose ranked solutions are the min-weight answers of ``q``."""
    res = is_free_connex(q)
    if not res.ok:
        edges = [frozenset(a.variables) for a in q.atoms]
        _, residue = gyo_reduce(edges)
        if residue:
            raise CyclicError([q.atoms[i].name for i in residue])
        raise NotFreeConnexError(res.residue)
    full = prepare(res.tree, _collapse_duplicates(db, d), d, answer_vars=q.free_vars)
    if len(res.u_nodes) == len(res.tree.atoms):
        return full
    return _restrict(full, res.u_nodes, d)


def _collapse_duplicates(db: Database, d) -> Database:
    """Duplicate rows merged with ⊕; min-weight answers cannot tell the difference."""
    out = Database()
    for name, rel in db.relations.items():
        best: dict = {}
        for row, w in rel:
            best[row] = d.prefer(best[row], w) if row in best else w
        out.add(name, list(best), list(best.values()), arity=rel.arity)
    return out


def _restrict(full: TdpInstance, u_nodes, d) -> TdpInstance:
    old = full.stages

    def keep(c):
        st = old[c]
        if st.kind == SOURCE:
            return True
        if st.kind == RELATION:
            return st.atom in u_nodes
        if st.kind == INTERMEDIATE:
            return old[st.children[0]].atom in u_nodes
        return False

    # new non-terminal stages in the original BFS order
    kept = [c for c in range(full.m + 1) if keep(c)]
    new_of = {c: i for i, c in enumerate(kept)}
    stages = []
    for c in kept:
        st = old[c]
        stages.append(Stage(new_of[c], st.kind, None if st.parent is None else new_of[st.parent],
                            atom=st.atom, key_vars=st.key_vars, level=st.level, sdepth=st.sdepth))
    cuts = []           # (new terminal, old intermediate stage)
    for c in kept:
        for ch in old[c].children:
            if ch in new_of:
                stages[new_of[c]].children.append(new_of[ch])
            elif old[ch].kind == INTERMEDIATE:
                cuts.append((c, ch))
    leaves = [c for c in kept if old[c].kind == RELATION
              and not any(ch in new_of or old[ch].kind == INTERMEDIATE for ch in old[c].children)]
    terminals = []
    for c, ch in cuts:
        terminals.append((c, ch))
    for c in leaves:
        terminals.append((c, None))
    for c, ch in terminals:
        idx = len(stages)
        p = stages[new_of[c]]
        stages.append(Stage(idx, TERMINAL, p.index, level=p.level, sdepth=p.sdepth + 1))
        p.children.append(idx)

    inst = TdpInstance(d, full.tree, stages, full.answer_vars, full.db)
    inst.witness_atoms = 0
    for c in kept:
        i = new_of[c]
        inst.labels[i] = full.labels[c]
        inst.values[i] = full.values[c]
        inst.weight[i] = full.weight[c]
        inst.adj[i] = [list(a) for a in full.adj[c]] if full.adj[c] is not None else None
    comb, zero = d.combine, d.zero
    for k, (c, ch) in enumerate(terminals):
        t = len(kept) + k
        n = full.nstates(c)
        if ch is None:
            inst.terminal_weight[t] = [d.one] * n
            continue
        best, W, P = full.best[ch], full.weight[ch], full.pi1[ch]
        # best branch value through the removed intermediate stage
        inst.terminal_weight[t] = [zero if best[u] < 0 else comb(W[best[u]], P[best[u]])
                                   for u in range(n)]
    return bottom_up(inst, d)


def cut_weights(inst: TdpInstance) -> dict:
    """Terminal edge weights of a rewritten instance, keyed by (parent atom name, parent values)."""
    out = {}
    for st in inst.stages:
        if st.kind != TERMINAL:
            continue
        p = inst.stages[st.parent]
        name = inst.tree.atoms[p.atom].name
        for u, w in enumerate(inst.terminal_weight[st.index]):
            out.setdefault((name, inst.values[p.index][u]), []).append(w)
    return out


__all__ = ["NotFreeConnexError", "cut_weights", "enumerate_all_weight", "rewrite_min_weight"]
