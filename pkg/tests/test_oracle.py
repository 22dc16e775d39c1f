import itertools

import pytest

from anyk.database import Database
from anyk.oracle import (CycleDetected, OracleCapExceeded, full_join, oracle_dag_paths,
                         oracle_join_sort)
from anyk.query import parse_query
from anyk.ranking import TROPICAL

from helpers import running


def test_running_example_head():
    wl, _ = running()
    ref = oracle_join_sort(wl.query, wl.db, TROPICAL)
    assert len(ref) == 12
    assert ref[0].weight == 111
    assert ref[0].witness == ((1, 1), (1, 4), (4, 1))
    assert [a.rank for a in ref] == list(range(1, 13))


def test_empty_relation_gives_nothing():
    q = parse_query("Q(a,b) :- R(a), S(b)")
    db = Database().add("R", [(1,)], [0]).add("S", [], [], arity=1)
    assert oracle_join_sort(q, db, TROPICAL) == []


def test_cartesian_4x4x4():
    q = parse_query("Q(a,b,c) :- R1(a), R2(b), R3(c)")
    ws = {1: [0, 3, 7, 9], 2: [1, 2, 4, 8], 3: [5, 6, 10, 20]}
    db = Database()
    for i in (1, 2, 3):
        db.add(f"R{i}", [(k,) for k in range(4)], ws[i])
    ref = oracle_join_sort(q, db, TROPICAL)
    assert len(ref) == 64
    assert [a.weight for a in ref] == sorted(sum(t) for t in itertools.product(*ws.values()))


def test_minweight_groups():
    q = parse_query("Q(a) :- R(a,b), S(b)")
    db = Database().add("R", [(1, 1), (1, 2), (2, 2)], [5, 1, 0]).add("S", [(1,), (2,)], [0, 4])
    ref = oracle_join_sort(q, db, TROPICAL, semantics="minweight")
    assert [(a.assignment, a.weight) for a in ref] == [({"a": 2}, 4), ({"a": 1}, 5)]
    with pytest.raises(ValueError):
        oracle_join_sort(q, db, TROPICAL, semantics="bag")


def test_constants_and_repeated_variables():
    q = parse_query("Q(a) :- R(a, 3, a)")
    db = Database().add("R", [(1, 3, 1), (1, 3, 2), (2, 4, 2)], [0, 0, 0])
    assert [a.assignment for a in oracle_join_sort(q, db, TROPICAL)] == [{"a": 1}]


def test_cap_aborts():
    q = parse_query("Q(a,b) :- R(a), S(b)")
    db = Database().add("R", [(i,) for i in range(50)]).add("S", [(i,) for i in range(50)])
    with pytest.raises(OracleCapExceeded):
        full_join(q, db, cap=100)


def test_dag_single_edge():
    assert oracle_dag_paths([("s", "t", 5)], "s", "t", TROPICAL) == [(("s", "t"), 5)]


def test_dag_diamond():
    edges = [("s", "a", 1), ("s", "b", 2), ("a", "t", 0), ("b", "t", 0)]
    assert oracle_dag_paths(edges, "s", "t", TROPICAL) == [(("s", "a", "t"), 1), (("s", "b", "t"), 2)]


def test_dag_running_example_graph():
    wl, _ = running()
    edges = []
    r1, r2, r3 = (wl.db.get(n) for n in ("R1", "R2", "R3"))
    for row, w in r1:
        edges.append(("s", ("R1", row), w))
    for (a, w1) in r1:
        for (b, w2) in r2:
            if a[1] == b[0]:
                edges.append((("R1", a), ("R2", b), w2))
    for (b, _) in r2:
        for (c, w3) in r3:
            if b[1] == c[0]:
                edges.append((("R2", b), ("R3", c), w3))
    for (c, _) in r3:
        edges.append((("R3", c), "t", 0))
    paths = oracle_dag_paths(edges, "s", "t", TROPICAL)
    assert len(paths) == 12 and paths[0][1] == 111


def test_dag_cycle_detected():
    with pytest.raises(CycleDetected):
        oracle_dag_paths([("s", "a", 1), ("a", "s", 1), ("a", "t", 1)], "s", "t", TROPICAL)


def test_dag_cap():
    edges = [(i, i + 1, 0) for i in range(20)] + [(i, i + 1, 1) for i in range(20)]
    with pytest.raises(OracleCapExceeded):
        oracle_dag_paths(edges, 0, 20, TROPICAL, cap=1000)


def test_oracle_shares_no_engine_code():
    import anyk.oracle as o
    src = open(o.__file__, encoding="utf-8").read()
    assert "dpgraph" not in src and "algorithms" not in src
