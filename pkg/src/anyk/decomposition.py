"""User-supplied decompositions of cyclic queries into acyclic members.

File format: members separated by lines holding ``---``; each member lists
one bag per line as a rule ``B(vars) :- body``.  The bodies of a member's
bags must together use every atom of the original query exactly once, and a
bag head keeps all of its body's variables.  Bags are materialised with the
engine, then every member is an acyclic query over its bags.
"""

from __future__ import annotations

from collections import Counter

from .algorithms import make_iterator
from .database import Database
from .dpgraph import prepare
from .query import ConjunctiveQuery, QuerySyntaxError, gyo_join_tree, parse_query
from .ranking import SelectiveDioid


class DecompositionError(ValueError):
    pass


def parse_decomposition(text: str) -> list[list[ConjunctiveQuery]]:
    members, cur = [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        if s == "---":
            if cur:
                members.append(cur)
            cur = []
            continue
        try:
            cur.append(parse_query(s))
        except QuerySyntaxError as e:
            raise DecompositionError(f"line {lineno}: {e}") from None
    if cur:
        members.append(cur)
    if not members:
        raise DecompositionError("decomposition lists no members")
    return members


def _sig(atom):
    return (atom.relation, atom.terms)


def check_member(q: ConjunctiveQuery, bags: list[ConjunctiveQuery]) -> None:
    want = Counter(_sig(a) for a in q.atoms)
    got = Counter(_sig(a) for b in bags for a in b.atoms)
    if want != got:
        raise DecompositionError("member bags do not cover the query atoms exactly once: "
                                 + ", ".join(b.head for b in bags))
    for b in bags:
        if set(b.free_vars) != set(b.variables):
            raise DecompositionError(f"bag {b.head} must keep all of its body's variables")


def member_instance(q: ConjunctiveQuery, bags: list[ConjunctiveQuery], db: Database,
                    d: SelectiveDioid, algo: str = "rec"):
    """Annotated instance of one member: bags materialised, then joined."""
    check_member(q, bags)
    bag_db = Database()
    names = set()
    for b in bags:
        if b.head in names or b.head in db:
            raise DecompositionError(f"bag name {b.head!r} is not unique")
        names.add(b.head)
        inst = prepare(gyo_join_tree(b), db, d, answer_vars=b.free_vars)
        rows, ws = [], []
        if not inst.empty:
            for ans in make_iterator(inst, algo):
                rows.append(tuple(ans.assignment[v] for v in b.free_vars))
                ws.append(ans.weight)
        bag_db.add(b.head, rows, ws, arity=len(b.free_vars))
    body = ", ".join(f"{b.head}({','.join(b.free_vars)})" for b in bags)
    mq = parse_query(f"{q.head}({','.join(q.free_vars)}) :- {body}")
    return prepare(gyo_join_tree(mq), bag_db, d, answer_vars=q.free_vars)


def union_instances(q: ConjunctiveQuery, members, db: Database, d: SelectiveDioid) -> list:
    if not q.is_full:
        raise DecompositionError("unions over decompositions need a full query")
    return [member_instance(q, bags, db, d) for bags in members]


__all__ = ["DecompositionError", "check_member", "member_instance", "parse_decomposition",
           "union_instances"]
