"""Random instances and small fixtures shared by the test modules."""

from __future__ import annotations

import random
from collections import Counter

from anyk.bench import running_example
from anyk.database import Database
from anyk.dpgraph import prepare
from anyk.query import JoinTree, gyo_join_tree, is_free_connex, parse_query
from anyk.ranking import TROPICAL

SHAPES = {
    "path2": "Q(x0,x1,x2) :- R1(x0,x1), R2(x1,x2)",
    "path3": "Q(x0,x1,x2,x3) :- R1(x0,x1), R2(x1,x2), R3(x2,x3)",
    "path4": "Q(x0,x1,x2,x3,x4) :- R1(x0,x1), R2(x1,x2), R3(x2,x3), R4(x3,x4)",
    "star": "Q(x0,x1,x2,x3) :- R1(x0,x1), R2(x0,x2), R3(x0,x3)",
    "tree7": "Q(x,y,z,u,a,p,f,g) :- R1(x,y,z), R2(y,u), R3(u,a), R4(y,p), R5(p,f), R6(p,g)",
}

QT = SHAPES["tree7"]
QFC = "Q(y1,y2,y3,y4) :- R1(y1,y2), R2(y2,y3), R3(x1,y1,y4), R4(x2,y3)"


def random_db(q, n, dom, rng, max_weight=9, integer=True) -> Database:
    """One relation per atom, ``n`` rows over [1, dom], small integer weights (ties likely)."""
    db = Database()
    for a in q.atoms:
        if a.relation in db:
            continue
        rows = [tuple(rng.randint(1, dom) for _ in range(a.arity)) for _ in range(n)]
        if integer:
            ws = [rng.randint(0, max_weight) for _ in rows]
        else:
            ws = [rng.uniform(0, max_weight) for _ in rows]
        db.add(a.relation, rows, ws, arity=a.arity)
    return db


def random_instance(shape, seed, max_n=30):
    """Query, database and annotated instance; fan-out kept to at most 3."""
    rng = random.Random(f"{shape}-{seed}")
    q = parse_query(SHAPES[shape])
    n = rng.randint(1, max_n)
    dom = max(2, n // rng.choice([1, 2, 3]))
    db = random_db(q, n, dom, rng)
    inst = prepare(gyo_join_tree(q), db, TROPICAL)
    return q, db, inst


def running():
    wl = running_example()
    inst = prepare(gyo_join_tree(wl.query), wl.db, wl.dioid)
    return wl, inst


def drawn_tree(root_r1: bool = True) -> JoinTree:
    """Q_T's tree as drawn: R1 above R2 and R4; R3 under R2; R5, R6 under R4.

    With ``root_r1=False`` the same tree is re-rooted at R6.
    """
    q = parse_query(QT)
    atoms = list(q.atoms)
    if root_r1:
        return JoinTree(atoms, [None, 0, 1, 0, 3, 3], 0)
    # R6 -> R4 -> {R1, R5}; R1 -> R2 -> R3
    return JoinTree(atoms, [3, 0, 1, 5, 3, None], 5)


def weights(answers):
    return [a.weight for a in answers]


def witness_multiset(answers):
    return Counter(a.rows for a in answers)


def assignment_multiset(answers):
    return Counter(tuple(sorted(a.assignment.items())) for a in answers)


def random_free_connex(seed, max_n=20):
    """A free-connex projection of a random shape with a matching random database."""
    rng = random.Random(f"fc-{seed}")
    bodies = list(SHAPES.values()) + [QFC]
    while True:
        full = parse_query(rng.choice(bodies))
        vs = list(full.variables)
        head = [v for v in vs if rng.random() < 0.5] or [rng.choice(vs)]
        body = str(full).split(":-", 1)[1]
        q = parse_query(f"Q({','.join(head)}) :-{body}")
        if is_free_connex(q).ok:
            break
    n = rng.randint(1, max_n)
    dom = max(2, n // rng.choice([1, 2, 3]))
    return q, random_db(q, n, dom, rng)
