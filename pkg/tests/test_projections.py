import random

import pytest

from anyk.algorithms import make_iterator
from anyk.database import Database
from anyk.oracle import oracle_join_sort
from anyk.projections import (NotFreeConnexError, cut_weights, enumerate_all_weight,
                              rewrite_min_weight)
from anyk.query import CyclicError, gyo_join_tree, parse_query
from anyk.ranking import MINMAX, TROPICAL

from helpers import QFC, assignment_multiset, random_db, random_free_connex, running, weights


def _qfc_db():
    return (Database().add("R1", [(1, 1)], [0]).add("R2", [(1, 1)], [0])
            .add("R3", [(1, 1, 1), (2, 1, 1)], [0, 5]).add("R4", [(1, 1), (2, 1)], [1, 2]))


def test_all_weight_repeats_projected_value():
    q = parse_query("Q(x1) :- R1(x1,x2), R2(x2,x3)")
    db = Database().add("R1", [(7, 1), (7, 2)], [5, 1]).add("R2", [(1, 0), (2, 0)], [0, 0])
    got = list(enumerate_all_weight(q, db, TROPICAL))
    assert [(a.assignment, a.weight) for a in got] == [({"x1": 7}, 1), ({"x1": 7}, 5)]


def test_all_weight_full_query_is_plain_enumeration():
    wl, inst = running()
    assert weights(enumerate_all_weight(wl.query, wl.db, TROPICAL)) == \
        weights(make_iterator(inst, "part"))


@pytest.mark.parametrize("algo", ["part", "rec", "part+", "batch"])
def test_all_weight_matches_oracle(algo):
    for seed in range(20):
        q, db = random_free_connex(seed, max_n=15)
        ref = oracle_join_sort(q, db, TROPICAL)
        got = list(enumerate_all_weight(q, db, TROPICAL, algo))
        assert weights(got) == weights(ref)
        assert assignment_multiset(got) == assignment_multiset(ref)


def test_qfc_cut_weight():
    inst = rewrite_min_weight(parse_query(QFC), _qfc_db(), TROPICAL)
    cuts = cut_weights(inst)
    # R4 offers (1,1) at 1 and (2,1) at 2 for y3 = 1
    assert cuts[("R4__proj2", (1,))] == [1]
    ans = list(make_iterator(inst, "part"))
    assert [(a.weight, a.assignment) for a in ans] == [(1, {"y1": 1, "y2": 1, "y3": 1, "y4": 1})]


def test_full_query_rewrite_keeps_instance():
    wl, inst = running()
    out = rewrite_min_weight(wl.query, wl.db, TROPICAL)
    assert out.m == inst.m
    assert weights(make_iterator(out, "rec")) == weights(make_iterator(inst, "rec"))


@pytest.mark.parametrize("algo", ["part", "rec", "part+", "batch"])
def test_min_weight_matches_group_by_oracle(algo):
    for seed in range(25):
        q, db = random_free_connex(seed, max_n=15)
        ref = oracle_join_sort(q, db, TROPICAL, semantics="minweight")
        got = list(make_iterator(rewrite_min_weight(q, db, TROPICAL), algo))
        assert weights(got) == weights(ref), seed
        assert assignment_multiset(got) == assignment_multiset(ref), seed
        assert max(assignment_multiset(got).values(), default=1) == 1


def test_min_weight_other_dioid():
    for seed in range(10):
        q, db = random_free_connex(seed)
        ref = oracle_join_sort(q, db, MINMAX, semantics="minweight")
        got = list(make_iterator(rewrite_min_weight(q, db, MINMAX), "part"))
        assert weights(got) == weights(ref)
        assert assignment_multiset(got) == assignment_multiset(ref)


def test_duplicate_rows_collapse_under_min_weight():
    q = parse_query("Q(a) :- R(a,b), S(b)")
    db = Database().add("R", [(1, 1), (1, 1)], [4, 2]).add("S", [(1,), (1,)], [3, 1])
    got = list(make_iterator(rewrite_min_weight(q, db, TROPICAL), "part"))
    assert [(a.assignment, a.weight) for a in got] == [({"a": 1}, 3)]


def test_cut_weights_independent_of_enumeration():
    q, db = random_free_connex(3)
    inst = rewrite_min_weight(q, db, TROPICAL)
    before = cut_weights(inst)
    list(make_iterator(inst, "part"))
    list(make_iterator(inst, "rec"))
    assert cut_weights(inst) == before


def test_not_free_connex_error_has_residue():
    q = parse_query("Q(x1,x3) :- R1(x1,x2), R2(x2,x3)")
    db = random_db(q, 5, 3, random.Random(0))
    with pytest.raises(NotFreeConnexError) as e:
        rewrite_min_weight(q, db, TROPICAL)
    assert e.value.residue


def test_cyclic_query_rejected():
    q = parse_query("Q(a) :- E(a,b), E(b,c), E(c,a)")
    db = Database().add("E", [(1, 2)], [0])
    with pytest.raises(CyclicError):
        rewrite_min_weight(q, db, TROPICAL)
    with pytest.raises(CyclicError):
        enumerate_all_weight(q, db, TROPICAL)


def test_min_weight_instance_shareable():
    q, db = random_free_connex(11)
    inst = rewrite_min_weight(q, db, TROPICAL)
    a, b = make_iterator(inst, "part"), make_iterator(inst, "rec")
    assert weights(a) == weights(b)
