"""Conjunctive queries: parsing, GYO reduction, join trees, free-connex test."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence


class QuerySyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line = line
        self.col = col


class CyclicError(ValueError):
    def __init__(self, residue: Sequence[str]):
        super().__init__("query is cyclic; GYO residue: " + ", ".join(residue))
        self.residue = list(residue)


@dataclass(frozen=True)
class Const:
    value: object

    def __repr__(self):
        return f"Const({self.value!r})"


@dataclass(frozen=True)
class Atom:
    name: str                 # unique within the query (self-join copies renamed)
    relation: str             # physical relation in the database
    terms: tuple              # variable names (str) or Const
    proj_vars: tuple | None = None   # set for introduced projection atoms

    @property
    def is_projection(self) -> bool:
        return self.proj_vars is not None

    @property
    def arity(self) -> int:
        return len(self.terms)

    @property
    def variables(self) -> tuple:
        if self.proj_vars is not None:
            return self.proj_vars
        seen = []
        for t in self.terms:
            if isinstance(t, str) and t not in seen:
                seen.append(t)
        return tuple(seen)

    def positions(self) -> tuple:
        """Column position of each variable (first occurrence)."""
        return tuple(self.terms.index(v) for v in self.variables)

    def selection(self) -> list:
        """Constraints implied by constants and repeated variables.

        Entries are ``("const", pos, value)`` or ``("eq", pos, first_pos)``.
        """
        out = []
        first = {}
        for i, t in enumerate(self.terms):
            if isinstance(t, Const):
                out.append(("const", i, t.value))
            elif t in first:
                out.append(("eq", i, first[t]))
            else:
                first[t] = i
        return out

    def __str__(self):
        terms = self.proj_vars if self.proj_vars is not None else self.terms
        ts = ",".join(t if isinstance(t, str) else repr(t.value) for t in terms)
        return f"{self.name}({ts})"


def select_rows(atom: Atom, rows):
    """Yield (row index, projected values) for rows passing the atom's selection."""
    sel = atom.selection()
    pos = atom.positions()
    for i, row in enumerate(rows):
        ok = True
        for kind, p, v in sel:
            if (row[p] != v) if kind == "const" else (row[p] != row[v]):
                ok = False
                break
        if ok:
            yield i, tuple(row[p] for p in pos)


@dataclass(frozen=True)
class ConjunctiveQuery:
    atoms: tuple
    free_vars: tuple
    self_join_copies: dict = field(default_factory=dict, compare=False)
    head: str = "Q"

    @property
    def variables(self) -> tuple:
        out = []
        for a in self.atoms:
            for v in a.variables:
                if v not in out:
                    out.append(v)
        return tuple(out)

    @property
    def is_full(self) -> bool:
        return set(self.free_vars) == set(self.variables)

    def full(self) -> "ConjunctiveQuery":
        """Same body, every variable free."""
        return ConjunctiveQuery(self.atoms, self.variables, self.self_join_copies, self.head)

    def __str__(self):
        return f"{self.head}({','.join(self.free_vars)}) :- " + ", ".join(map(str, self.atoms))


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n) | (?P<comment>\#[^\n]*)
  | (?P<arrow>:-) | (?P<lp>\() | (?P<rp>\)) | (?P<comma>,) | (?P<dot>\.)
  | (?P<num>-?\d+(?:\.\d+)?) | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<str>'[^'\n]*'|"[^"\n]*")
""", re.X)


def _tokenize(text: str):
    toks = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        val = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind not in ("ws", "comment"):
                toks.append((kind, val, line, col))
            col += len(val)
        pos = m.end()
    toks.append(("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def expect(self, kind):
        t = self.toks[self.i]
        if t[0] != kind:
            what = "end of input" if t[0] == "eof" else repr(t[1])
            raise QuerySyntaxError(f"expected {kind}, found {what}", t[2], t[3])
        self.i += 1
        return t

    def term(self, allow_const):
        t = self.peek()
        if t[0] == "ident":
            self.i += 1
            return t[1]
        if allow_const and t[0] == "num":
            self.i += 1
            return Const(float(t[1]) if "." in t[1] else int(t[1]))
        if allow_const and t[0] == "str":
            self.i += 1
            return Const(t[1][1:-1])
        what = "end of input" if t[0] == "eof" else repr(t[1])
        raise QuerySyntaxError(f"expected a term, found {what}", t[2], t[3])

    def atom(self, allow_const):
        name = self.expect("ident")
        self.expect("lp")
        terms = []
        if self.peek()[0] != "rp":
            terms.append(self.term(allow_const))
            while self.peek()[0] == "comma":
                self.i += 1
                terms.append(self.term(allow_const))
        self.expect("rp")
        return name, terms

    def query(self):
        head, hvars = self.atom(False)
        self.expect("arrow")
        body = [self.atom(True)]
        while self.peek()[0] == "comma":
            self.i += 1
            body.append(self.atom(True))
        if self.peek()[0] == "dot":
            self.i += 1
        self.expect("eof")
        return head, hvars, body


def parse_query(text: str) -> ConjunctiveQuery:
    head, hvars, body = _Parser(text).query()
    hname, hv = head[1], hvars
    if len(set(hv)) != len(hv):
        raise QuerySyntaxError("repeated head variable", head[2], head[3])
    atoms = []
    copies = {}
    count: dict[str, int] = {}
    for (tok, terms) in body:
        rel = tok[1]
        n = count.get(rel, 0)
        count[rel] = n + 1
        name = rel if n == 0 else f"{rel}__copy{n}"
        if n:
            copies[name] = rel
        atoms.append(Atom(name, rel, tuple(terms)))
    body_vars = {t for a in atoms for t in a.terms if isinstance(t, str)}
    for v in hv:
        if v not in body_vars:
            raise QuerySyntaxError(f"head variable {v!r} does not occur in the body", head[2], head[3])
    return ConjunctiveQuery(tuple(atoms), tuple(hv), copies, hname)


# ---------------------------------------------------------------- join trees

@dataclass
class JoinTree:
    atoms: list
    parent: list        # parent atom index, None at the root
    root: int
    children: list = field(default_factory=list)

    def __post_init__(self):
        if not self.children:
            self.children = [[] for _ in self.atoms]
            for i, p in enumerate(self.parent):
                if p is not None:
                    self.children[p].append(i)
            for c in self.children:
                c.sort()

    def bfs_order(self) -> list:
        out, q = [], deque([self.root])
        while q:
            u = q.popleft()
            out.append(u)
            q.extend(self.children[u])
        return out

    def levels(self) -> list:
        lv = [[self.root]]
        while True:
            nxt = [c for u in lv[-1] for c in self.children[u]]
            if not nxt:
                return lv
            lv.append(nxt)

    @property
    def depth(self) -> int:
        return len(self.levels())

    def shared_vars(self, child: int) -> tuple:
        """Join variables between a node and its parent, in the child's order."""
        p = self.parent[child]
        pv = set(self.atoms[p].variables)
        return tuple(v for v in self.atoms[child].variables if v in pv)


def check_running_intersection(t: JoinTree) -> bool:
    for v in {v for a in t.atoms for v in a.variables}:
        holders = {i for i, a in enumerate(t.atoms) if v in a.variables}
        # connected iff exactly one holder has its parent outside the set
        tops = [i for i in holders if t.parent[i] is None or t.parent[i] not in holders]
        if len(tops) != 1:
            return False
    return len(t.bfs_order()) == len(t.atoms)


def gyo_reduce(edges: Sequence[frozenset]):
    """Ear removal.  Returns (undirected tree edges, residue indices).

    The residue is empty iff the hypergraph is acyclic.  Ears are taken lowest
    index first, each attached to the lowest-index witness.
    """
    alive = list(range(len(edges)))
    tree = []
    while len(alive) > 1:
        for e in alive:
            others = [f for f in alive if f != e]
            rest = set().union(*(edges[f] for f in others))
            shared = edges[e] & rest
            wit = next((f for f in others if shared <= edges[f]), None)
            if wit is not None:
                tree.append((e, wit))
                alive.remove(e)
                break
        else:
            return tree, alive
    return tree, []


def _orient(n: int, tree_edges, root: int) -> list:
    adj = [[] for _ in range(n)]
    for a, b in tree_edges:
        adj[a].append(b)
        adj[b].append(a)
    parent = [None] * n
    seen = {root}
    q = deque([root])
    while q:
        u = q.popleft()
        for v in sorted(adj[u]):
            if v not in seen:
                seen.add(v)
                parent[v] = u
                q.append(v)
    return parent


def _depth_from(n, tree_edges, root):
    adj = [[] for _ in range(n)]
    for a, b in tree_edges:
        adj[a].append(b)
        adj[b].append(a)
    dist = {root: 1}
    q = deque([root])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    return max(dist.values())


def _best_root(n, tree_edges, candidates):
    best, best_d = None, -1
    for r in candidates:
        d = _depth_from(n, tree_edges, r)
        if d > best_d:
            best, best_d = r, d
    return best


def gyo_join_tree(q: ConjunctiveQuery, root: int | None = None) -> JoinTree:
    """Join tree of an acyclic query, rooted to maximise depth unless ``root`` is given."""
    if not q.atoms:
        raise ValueError("query has no atoms")
    edges = [frozenset(a.variables) for a in q.atoms]
    tree, residue = gyo_reduce(edges)
    if residue:
        raise CyclicError([q.atoms[i].name for i in residue])
    n = len(edges)
    if root is None:
        root = _best_root(n, tree, range(n))
    return JoinTree(list(q.atoms), _orient(n, tree, root), root)


class FreeConnexResult(NamedTuple):
    ok: bool
    tree: JoinTree | None
    u_nodes: frozenset
    residue: list


def is_free_connex(q: ConjunctiveQuery) -> FreeConnexResult:
    """Decide free-connexity and build a join tree with a connected U covering free(q).

    Components hanging off the virtual head atom are summarised by their top
    node; when that node has existential variables it gets a projection atom
    parent ``<rel>__proj<i>`` which joins U instead.
    """
    atoms = list(q.atoms)
    n = len(atoms)
    edges = [frozenset(a.variables) for a in atoms]
    tree, residue = gyo_reduce(edges)
    if residue:
        return FreeConnexResult(False, None, frozenset(), [atoms[i].name for i in residue])
    if q.is_full:
        jt = gyo_join_tree(q)
        return FreeConnexResult(True, jt, frozenset(range(n)), [])
    free = frozenset(q.free_vars)
    tree, residue = gyo_reduce(edges + [free])
    if residue:
        names = [atoms[i].name if i < n else "<head>" for i in residue]
        return FreeConnexResult(False, None, frozenset(), names)
    par = _orient(n + 1, tree, n)
    # components: tree edges below the head joined when they share an existential variable
    comp = list(range(n))

    def find(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    for c in range(n):
        p = par[c]
        if p != n and (edges[c] & edges[p]) - free:
            comp[find(c)] = find(p)
    groups: dict[int, list] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)

    new_atoms = list(atoms)
    links = []          # undirected edges of the final tree
    u_nodes = []
    for members in sorted(groups.values()):
        mset = set(members)
        top = next(i for i in members if par[i] not in mset)
        for i in members:
            if i != top:
                links.append((i, par[i]))
        a = atoms[top]
        if set(a.variables) <= free:
            u_nodes.append(top)
        else:
            keep = tuple(v for v in a.variables if v in free)
            proj = Atom(f"{a.relation}__proj{len(new_atoms) - n + 1}", a.relation, a.terms, keep)
            new_atoms.append(proj)
            links.append((top, len(new_atoms) - 1))
            u_nodes.append(len(new_atoms) - 1)
    # U-tree over the U nodes only; acyclic because its edges are a subset
    # of a free-connex hypergraph restricted to free variables
    u_edges = [frozenset(new_atoms[i].variables) for i in u_nodes]
    u_tree, u_res = gyo_reduce(u_edges)
    if u_res:
        # should not happen for a free-connex query
        return FreeConnexResult(False, None, frozenset(), [new_atoms[u_nodes[i]].name for i in u_res])
    links += [(u_nodes[a], u_nodes[b]) for a, b in u_tree]
    m = len(new_atoms)
    root = _best_root(m, links, sorted(u_nodes))
    jt = JoinTree(new_atoms, _orient(m, links, root), root)
    return FreeConnexResult(True, jt, frozenset(u_nodes), [])


# ---------------------------------------------------------------- decompositions

@dataclass
class SerialDecomposition:
    vertices: list      # lists of atom indices, one list per tree level
    width: int


def serial_decomposition(t: JoinTree) -> SerialDecomposition:
    lv = t.levels()
    return SerialDecomposition(lv, max(len(v) for v in lv))
