"""Brute-force references: nested-loop joins and explicit DAG path listing.

Nothing here touches the T-DP machinery; only the query and data containers
are shared.
"""

from __future__ import annotations

from .answers import RankedAnswer
from .database import Database
from .query import Const, ConjunctiveQuery
from .ranking import SelectiveDioid

DEFAULT_CAP = 10 ** 6


class OracleCapExceeded(RuntimeError):
    pass


class CycleDetected(ValueError):
    pass


def _order_key(d, weight, assignment_values):
    vals = tuple((type(x).__name__, x) if not isinstance(x, (int, float)) else ("", x)
                 for x in assignment_values)
    return (d.key(weight), vals)


def full_join(q: ConjunctiveQuery, db: Database, cap: int = DEFAULT_CAP):
    """Every witness as (binding, row indices, rows), by nested loops in atom order."""
    rels = [db.get(a.relation, a.arity) for a in q.atoms]
    out = []
    count = 0
    binding: dict = {}
    rows_idx = [0] * len(q.atoms)

    def visit(i):
        nonlocal count
        if i == len(q.atoms):
            out.append((dict(binding), tuple(rows_idx)))
            return
        atom = q.atoms[i]
        for r, row in enumerate(rels[i].rows):
            added = []
            ok = True
            for t, val in zip(atom.terms, row):
                if isinstance(t, Const):
                    if t.value != val:
                        ok = False
                        break
                elif t in binding:
                    if binding[t] != val:
                        ok = False
                        break
                else:
                    binding[t] = val
                    added.append(t)
            if ok:
                count += 1
                if count > cap:
                    raise OracleCapExceeded(f"intermediate result exceeds {cap}")
                rows_idx[i] = r
                visit(i + 1)
            for t in added:
                del binding[t]

    visit(0)
    return out, rels


def oracle_join_sort(q: ConjunctiveQuery, db: Database, d: SelectiveDioid,
                     semantics: str = "allweights", cap: int = DEFAULT_CAP) -> list:
    """All answers in ⪯ order.

    ``allweights`` keeps one answer per witness (projected on the free
    variables); ``minweight`` keeps one per distinct assignment with the
    ⊕-aggregate of its witnesses' weights.
    """
    joined, rels = full_join(q, db, cap)
    free = q.free_vars
    items = []
    for binding, ridx in joined:
        w = d.one
        for rel, r in zip(rels, ridx):
            w = d.combine(w, rel.weights[r])
        assignment = {v: binding[v] for v in free}
        wit = tuple(rel.rows[r] for rel, r in zip(rels, ridx))
        items.append((w, assignment, wit, ridx))
    if semantics == "minweight":
        groups: dict = {}
        for w, a, _, _ in items:
            k = tuple(a[v] for v in free)
            groups[k] = d.prefer(groups[k], w) if k in groups else w
        items = [(w, dict(zip(free, k)), None, None) for k, w in groups.items()]
    elif semantics != "allweights":
        raise ValueError(f"unknown semantics {semantics!r}")
    items.sort(key=lambda it: _order_key(d, it[0], [it[1][v] for v in free]))
    return [RankedAnswer(i + 1, w, a, wit, ridx) for i, (w, a, wit, ridx) in enumerate(items)]


def oracle_dag_paths(edges, s, t, d: SelectiveDioid, cap: int = DEFAULT_CAP) -> list:
    """All s-t paths of a DAG given as (u, v, weight) triples, sorted by weight."""
    adj: dict = {}
    for u, v, w in edges:
        adj.setdefault(u, []).append((v, w))
    # colour-based cycle check over the part reachable from s
    colour: dict = {}

    def check(u):
        colour[u] = 1
        for v, _ in adj.get(u, ()):
            c = colour.get(v, 0)
            if c == 1:
                raise CycleDetected(f"cycle through {v!r}")
            if c == 0:
                check(v)
        colour[u] = 2

    check(s)
    out = []
    path = [s]

    def dfs(u, acc):
        if u == t:
            out.append((tuple(path), acc))
            if len(out) > cap:
                raise OracleCapExceeded(f"more than {cap} paths")
            return
        for v, w in adj.get(u, ()):
            path.append(v)
            dfs(v, d.combine(acc, w))
            path.pop()

    dfs(s, d.one)
    out.sort(key=lambda pw: (d.key(pw[1]), [repr(x) for x in pw[0]]))
    return out
