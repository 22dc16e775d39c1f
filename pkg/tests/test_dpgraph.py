import io
import random

import pytest

from anyk.database import ArityError, Database, MissingRelationError
from anyk.dpgraph import (INTERMEDIATE, RELATION, SOURCE, TERMINAL, EmptyResult, bottom_up,
                          build_tdp, prepare, top1_solution)
from anyk.oracle import oracle_join_sort
from anyk.query import gyo_join_tree, parse_query
from anyk.ranking import TROPICAL

from helpers import SHAPES, random_instance, running


def _stage_of(inst, rel):
    for st in inst.stages:
        if st.kind == RELATION and inst.tree.atoms[st.atom].name == rel:
            return st.index
    raise KeyError(rel)


def _state(inst, rel, row):
    c = _stage_of(inst, rel)
    rows = inst.db.get(rel).rows
    return c, [rows[r] for r in inst.labels[c]].index(row)


def test_running_example_layout():
    _, inst = running()
    kinds = [st.kind for st in inst.stages]
    assert kinds == [SOURCE, RELATION, INTERMEDIATE, RELATION, INTERMEDIATE, RELATION, TERMINAL]
    assert inst.m == 5


def test_join_value_one_becomes_one_intermediate_node():
    _, inst = running()
    c = 2                       # intermediate between R1 and R2
    j = inst.labels[c].index((1,))
    parents = [u for u, lst in enumerate(inst.adj[c]) if j in lst]
    assert len(parents) == 2
    assert len(inst.adj[3][j]) == 3
    # intermediate edges weigh one
    assert inst.weight[c][j] == TROPICAL.one


def test_running_example_pruning():
    _, inst = running()
    for rel, row in [("R2", (2, 7)), ("R1", (3, 2)), ("R1", (4, 2))]:
        c, v = _state(inst, rel, row)
        assert inst.pruned[c][v], (rel, row)
    c, v = _state(inst, "R1", (1, 1))
    assert not inst.pruned[c][v]


def test_running_example_pi1():
    _, inst = running()
    c, v = _state(inst, "R1", (1, 1))
    assert inst.pi1[c][v] == 110
    assert inst.pi1[0][0] == 111
    for st in inst.stages:
        if st.kind == TERMINAL:
            assert inst.pi1[st.index] == [TROPICAL.one]


def test_top1_running_example():
    _, inst = running()
    ans = top1_solution(inst)
    assert ans.weight == 111
    assert ans.witness == ((1, 1), (1, 4), (4, 1))


def test_single_atom_instance():
    q = parse_query("Q(a) :- R(a)")
    db = Database().add("R", [(7,)], [3])
    inst = prepare(gyo_join_tree(q), db, TROPICAL)
    assert [st.kind for st in inst.stages] == [SOURCE, RELATION, TERMINAL]
    assert top1_solution(inst).weight == 3


def test_cartesian_top1_is_per_relation_minimum():
    q = parse_query("Q(a,b,c) :- R1(a), R2(b), R3(c)")
    db = Database()
    mins = []
    rng = random.Random(1)
    for i in (1, 2, 3):
        ws = [rng.randint(0, 50) for _ in range(5)]
        mins.append(min(ws))
        db.add(f"R{i}", [(k,) for k in range(5)], ws)
    inst = prepare(gyo_join_tree(q), db, TROPICAL)
    assert top1_solution(inst).weight == sum(mins)
    # one intermediate node joins every parent state to every child state
    inter = [st.index for st in inst.stages if st.kind == INTERMEDIATE]
    assert all(len(inst.weight[c]) == 1 for c in inter)


def test_empty_result():
    q = parse_query("Q(a,b,c) :- R(a,b), S(b,c)")
    db = Database().add("R", [(1, 2)], [1]).add("S", [(3, 4)], [1])
    inst = prepare(gyo_join_tree(q), db, TROPICAL)
    assert inst.empty
    with pytest.raises(EmptyResult):
        top1_solution(inst)


def test_missing_relation_and_arity():
    q = parse_query("Q(a,b) :- R(a,b)")
    with pytest.raises(MissingRelationError):
        build_tdp(gyo_join_tree(q), Database(), TROPICAL)
    with pytest.raises(ArityError):
        build_tdp(gyo_join_tree(q), Database().add("R", [(1, 2, 3)]), TROPICAL)


def _count_solutions(inst):
    """Number of s-t solutions, counted over the stage tree."""
    cnt = [None] * len(inst.stages)
    for c in range(inst.m, -1, -1):
        n = inst.nstates(c)
        vals = [1] * n
        for ch in inst.child_stages(c):
            for u in range(n):
                vals[u] *= sum(cnt[ch][v] for v in inst.adj[ch][u])
        cnt[c] = vals
    return cnt[0][0]


@pytest.mark.parametrize("shape", sorted(SHAPES))
def test_path_preservation_and_invariants(shape):
    for seed in range(15):
        q, db, inst = random_instance(shape, seed)
        assert _count_solutions(inst) == len(oracle_join_sort(q, db, TROPICAL))
        d = inst.dioid
        for c in range(1, inst.m + 1):
            p = inst.parent[c]
            for u in range(inst.nstates(p)):
                if inst.pruned[p][u]:
                    continue
                # surviving states keep a choice per child stage, and π1 is optimal
                assert inst.adj[c][u]
                for v in inst.adj[c][u]:
                    assert not inst.pruned[c][v]
                    assert inst.pi1[c][v] != d.zero
        # linear edge count: two per tuple plus source and terminal edges
        rel_sizes = sum(len(r) for r in db.relations.values())
        boundary = inst.nstates(1) + sum(len(inst.terminal_weight[st.index])
                                         for st in inst.stages if st.kind == TERMINAL)
        assert inst.edge_count() <= 2 * rel_sizes + boundary
        assert inst.state_count() <= inst.state_count(include_pruned=True)


def test_pi1_optimality():
    for seed in range(10):
        _, _, inst = random_instance("tree7", seed)
        d = inst.dioid
        for c in range(1, inst.m + 1):
            for u, lst in enumerate(inst.adj[c]):
                if lst:
                    best = d.prefer_all(d.combine(inst.weight[c][v], inst.pi1[c][v]) for v in lst)
                    v = inst.best[c][u]
                    assert d.combine(inst.weight[c][v], inst.pi1[c][v]) == best


def test_top1_matches_oracle_head():
    for seed in range(20):
        q, db, inst = random_instance("path3", seed, max_n=20)
        ref = oracle_join_sort(q, db, TROPICAL)
        if not ref:
            assert inst.empty
            continue
        assert top1_solution(inst).weight == ref[0].weight


def test_bottom_up_marks_instance_ready():
    wl, _ = running()
    inst = build_tdp(gyo_join_tree(wl.query), wl.db, TROPICAL)
    assert not inst.ready
    bottom_up(inst)
    assert inst.pi1[0][0] == 111


def test_dump_edges_format():
    _, inst = running()
    buf = io.StringIO()
    inst.dump_edges(buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == inst.edge_count()
    assert all(len(line.split()) == 4 for line in lines)
