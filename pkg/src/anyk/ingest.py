"""CSV ingestion.

Numeric fields become ints (or floats); any other string is replaced by a
small integer id from a shared ``Interner`` so that joins compare ints.
"""

from __future__ import annotations

import csv
import dataclasses
import os

from .database import Database, Relation
from .query import Const, ConjunctiveQuery
from .ranking import INF, TROPICAL, SelectiveDioid

WEIGHT_MODES = ("last", "unit", "attribute")


class IngestError(ValueError):
    pass


class Interner:
    """Two-way map between strings and non-negative integer ids.

    Ids are kept apart from genuine integers by a wrapper type.
    """

    def __init__(self):
        self.ids: dict = {}
        self.strings: list = []

    def encode(self, s: str) -> "StrId":
        i = self.ids.get(s)
        if i is None:
            i = self.ids[s] = StrId(len(self.strings))
            self.strings.append(s)
        return i

    def decode(self, x):
        if isinstance(x, StrId):
            return self.strings[int(x)]
        return x

    def encode_query(self, q: ConjunctiveQuery) -> ConjunctiveQuery:
        """String constants in the body rewritten to their ids."""
        atoms = []
        for a in q.atoms:
            terms = tuple(Const(self.encode(t.value)) if isinstance(t, Const)
                          and isinstance(t.value, str) else t for t in a.terms)
            atoms.append(dataclasses.replace(a, terms=terms))
        return dataclasses.replace(q, atoms=tuple(atoms))


class StrId(int):
    """Integer id of an interned string.

    Equal only to another id, so a string never joins with the integer that
    happens to share its id.  Orders like an int.
    """

    __slots__ = ()

    def __eq__(self, other):
        return isinstance(other, StrId) and int(self) == int(other)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash(("StrId", int(self)))

    def __repr__(self):
        return f"StrId({int(self)})"


def parse_value(tok: str, interner: Interner | None):
    tok = tok.strip()
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        f = float(tok)
    except ValueError:
        return interner.encode(tok) if interner is not None else tok
    # "nan" and "inf" are strings in data columns
    if f != f or f in (INF, -INF):
        return interner.encode(tok) if interner is not None else tok
    return f


def parse_weight(tok: str, d: SelectiveDioid = TROPICAL):
    """A scalar, or ';'-separated components for vector dioids; "inf" allowed."""
    tok = tok.strip()
    parts = tok.split(";")
    try:
        vals = [_num(p) for p in parts]
    except ValueError:
        raise IngestError(f"unparseable weight {tok!r}") from None
    if isinstance(d.one, tuple):
        if len(vals) != len(d.one):
            raise IngestError(f"weight {tok!r} needs {len(d.one)} components")
        return tuple(vals)
    if len(vals) != 1:
        raise IngestError(f"unparseable weight {tok!r}")
    return vals[0]


def _num(p):
    p = p.strip()
    try:
        return int(p)
    except ValueError:
        f = float(p)
        if f != f:
            raise ValueError("nan")
        return f


def ingest_csv(path, arity: int, weight_mode: str = "last", header: bool = False,
               interner: Interner | None = None, dioid: SelectiveDioid = TROPICAL) -> Relation:
    """Read one relation.

    ``last``: the final column is the weight.  ``unit`` and ``attribute``:
    every column is data and weights start at the dioid's one; attribute
    weights are added afterwards by ``apply_attribute_weights``.
    """
    if weight_mode not in WEIGHT_MODES:
        raise ValueError(f"unknown weight mode {weight_mode!r}")
    width = arity + 1 if weight_mode == "last" else arity
    rows, weights = [], []
    with open(path, newline="", encoding="utf-8") as f:
        for lineno, rec in enumerate(csv.reader(f), 1):
            if header and lineno == 1:
                continue
            if not rec or (len(rec) == 1 and not rec[0].strip()):
                continue
            if len(rec) != width:
                raise IngestError(f"{path}:{lineno}: expected {width} columns, got {len(rec)}")
            rows.append(tuple(parse_value(t, interner) for t in rec[:arity]))
            if weight_mode == "last":
                try:
                    weights.append(parse_weight(rec[arity], dioid))
                except IngestError as e:
                    raise IngestError(f"{path}:{lineno}: {e}") from None
            else:
                weights.append(dioid.one)
    return Relation(rows, weights, arity)


def read_attribute_weights(path, interner: Interner | None = None,
                           dioid: SelectiveDioid = TROPICAL) -> dict:
    """``variable,value,weight`` lines -> {variable: {value: weight}}."""
    out: dict = {}
    with open(path, newline="", encoding="utf-8") as f:
        for lineno, rec in enumerate(csv.reader(f), 1):
            if not rec or rec[0].startswith("#"):
                continue
            if len(rec) != 3:
                raise IngestError(f"{path}:{lineno}: expected variable,value,weight")
            try:
                w = parse_weight(rec[2], dioid)
            except IngestError as e:
                if lineno == 1:
                    continue        # header
                raise IngestError(f"{path}:{lineno}: {e}") from None
            out.setdefault(rec[0].strip(), {})[parse_value(rec[1], interner)] = w
    return out


def apply_attribute_weights(q: ConjunctiveQuery, db: Database, attr: dict,
                            d: SelectiveDioid = TROPICAL) -> tuple[ConjunctiveQuery, Database]:
    """Move domain-value weights onto tuples.

    Each weighted variable goes to the first atom that contains it, and that
    atom's tuples absorb the weight of their value; values without an entry
    weigh one.  An atom receiving weights gets a private copy of its relation,
    so self-join copies are charged independently.
    """
    owner: dict = {}
    for v in attr:
        for i, a in enumerate(q.atoms):
            if v in a.variables:
                owner[v] = i
                break
        else:
            raise IngestError(f"weighted variable {v!r} does not occur in the query")
    per_atom: dict = {}
    for v, i in owner.items():
        per_atom.setdefault(i, []).append(v)
    out = Database(dict(db.relations))
    atoms = list(q.atoms)
    for i, vs in sorted(per_atom.items()):
        a = atoms[i]
        rel = db.get(a.relation, a.arity)
        cols = [(a.terms.index(v), attr[v]) for v in vs]
        ws = []
        for row, w in rel:
            for p, table in cols:
                w = d.combine(w, table.get(row[p], d.one))
            ws.append(w)
        name = f"{a.relation}__attr{i}"
        out.relations[name] = Relation(list(rel.rows), ws, rel.arity)
        atoms[i] = dataclasses.replace(a, relation=name)
    return dataclasses.replace(q, atoms=tuple(atoms)), out


def load_database(q: ConjunctiveQuery, data_dir, weight_mode: str = "last", header: bool = False,
                  interner: Interner | None = None, dioid: SelectiveDioid = TROPICAL) -> Database:
    """``<relation>.csv`` from ``data_dir`` for every relation the query mentions."""
    db = Database()
    for a in q.atoms:
        if a.relation in db:
            continue
        path = os.path.join(data_dir, f"{a.relation}.csv")
        db.relations[a.relation] = ingest_csv(path, a.arity, weight_mode, header, interner, dioid)
    return db


__all__ = ["IngestError", "Interner", "StrId", "WEIGHT_MODES", "apply_attribute_weights",
           "ingest_csv", "load_database", "parse_value", "parse_weight",
           "read_attribute_weights"]
