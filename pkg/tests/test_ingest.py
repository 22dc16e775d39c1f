import pytest

from anyk.dpgraph import prepare
from anyk.ingest import (IngestError, Interner, StrId, apply_attribute_weights, ingest_csv,
                         load_database, parse_value, parse_weight, read_attribute_weights)
from anyk.oracle import oracle_join_sort
from anyk.query import gyo_join_tree, parse_query
from anyk.ranking import INF, TROPICAL, lexicographic


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_last_column_weight(tmp_path):
    rel = ingest_csv(_write(tmp_path, "R.csv", "1,1,1.0\n"), 2)
    assert rel.rows == [(1, 1)] and rel.weights == [1.0]


def test_unit_weights(tmp_path):
    rel = ingest_csv(_write(tmp_path, "R.csv", "1,1\n2,3\n"), 2, weight_mode="unit")
    assert rel.weights == [0, 0]


def test_ragged_row_and_bad_weight(tmp_path):
    with pytest.raises(IngestError, match=":2:"):
        ingest_csv(_write(tmp_path, "R.csv", "1,2,3\n1,2\n"), 2)
    with pytest.raises(IngestError):
        ingest_csv(_write(tmp_path, "S.csv", "1,2,heavy\n"), 2)


def test_header_and_infinite_weight(tmp_path):
    rel = ingest_csv(_write(tmp_path, "R.csv", "a,b,w\n1,2,inf\n"), 2, header=True)
    assert rel.rows == [(1, 2)] and rel.weights == [INF]


def test_strings_are_interned(tmp_path):
    it = Interner()
    rel = ingest_csv(_write(tmp_path, "R.csv", "alice,7,1\nbob,alice,2\n"), 2, interner=it)
    a = rel.rows[0][0]
    assert isinstance(a, StrId) and rel.rows[1][1] == a
    assert it.decode(a) == "alice" and it.decode(7) == 7
    # an id never equals the int it wraps
    assert StrId(0) != 0 and 0 != StrId(0)


def test_parse_value_kinds():
    assert parse_value("3", None) == 3
    assert parse_value("2.5", None) == 2.5
    assert parse_value("nan", None) == "nan"
    assert parse_value(" x ", None) == "x"


def test_lex_weights():
    lex = lexicographic(2)
    assert parse_weight("1;2", lex) == (1, 2)
    with pytest.raises(IngestError):
        parse_weight("1", lex)
    with pytest.raises(IngestError):
        parse_weight("1;2", TROPICAL)


def test_attribute_weights_sum_onto_tuples(tmp_path):
    q = parse_query("Q(x1,x2) :- R(x1,x2)")
    it = Interner()
    _write(tmp_path, "R.csv", "c,d\nc,e\n")
    db = load_database(q, tmp_path, weight_mode="attribute", interner=it)
    attr = read_attribute_weights(_write(tmp_path, "w.csv", "variable,value,weight\nx1,c,3\nx2,d,4\n"), it)
    q2, db2 = apply_attribute_weights(q, db, attr)
    ans = oracle_join_sort(q2, db2, TROPICAL)
    assert [a.weight for a in ans] == [3, 7]
    assert ans[1].assignment == {"x1": it.encode("c"), "x2": it.encode("d")}


def test_attribute_weight_charged_once_per_variable(tmp_path):
    q = parse_query("Q(a,b,c) :- R(a,b), S(b,c)")
    _write(tmp_path, "R.csv", "1,2\n")
    _write(tmp_path, "S.csv", "2,3\n")
    db = load_database(q, tmp_path, weight_mode="unit")
    q2, db2 = apply_attribute_weights(q, db, {"b": {2: 5}})
    inst = prepare(gyo_join_tree(q2), db2, TROPICAL)
    assert inst.pi1[0][0] == 5
    with pytest.raises(IngestError):
        apply_attribute_weights(q, db, {"zz": {1: 1}})


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_database(parse_query("Q(a) :- R(a)"), tmp_path)
