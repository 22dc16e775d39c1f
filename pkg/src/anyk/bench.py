"""Workload generators and the TT(k) measurement harness."""

from __future__ import annotations

import csv
import gc
import random
import sys
import time
from dataclasses import dataclass

from .algorithms import batch_yannakakis_sort, make_iterator
from .database import Database
from .dpgraph import prepare
from .query import ConjunctiveQuery, gyo_join_tree, parse_query
from .ranking import TROPICAL, SelectiveDioid

CSV_FIELDS = ["algo", "workload", "k", "elapsed_ns", "pq_pops", "pq_pushes", "succ_calls",
              "max_pq_size"]


@dataclass
class Workload:
    name: str
    query: ConjunctiveQuery
    db: Database
    dioid: SelectiveDioid = TROPICAL


def path_query(length: int, rel: str = "R") -> ConjunctiveQuery:
    atoms = ", ".join(f"{rel}{i}(x{i - 1},x{i})" for i in range(1, length + 1))
    head = ",".join(f"x{i}" for i in range(length + 1))
    return parse_query(f"Q({head}) :- {atoms}")


def gen_synthetic(n: int, length: int, domain_divisor: int, seed, integer_weights: bool = False,
                  max_weight: int = 10000) -> Database:
    """``length`` binary relations R1.. of ``n`` tuples over [1, n/domain_divisor]."""
    if n < 1 or length < 1 or domain_divisor < 1:
        raise ValueError("n, length and domain_divisor must be positive")
    rng = random.Random(seed)
    dom = max(1, n // domain_divisor)
    db = Database()
    for i in range(1, length + 1):
        rows = [(rng.randint(1, dom), rng.randint(1, dom)) for _ in range(n)]
        if integer_weights:
            ws = [rng.randint(0, max_weight) for _ in range(n)]
        else:
            ws = [rng.uniform(0, max_weight) for _ in range(n)]
        db.add(f"R{i}", rows, ws, arity=2)
    return db


def synthetic_workload(n, length, domain_divisor, seed, integer_weights=False) -> Workload:
    return Workload(f"path{length}_n{n}_d{domain_divisor}_s{seed}", path_query(length),
                    gen_synthetic(n, length, domain_divisor, seed, integer_weights))


def gen_cartesian(n: int, length: int, seed, integer_weights: bool = True,
                  max_weight: int = 10000) -> Workload:
    """Unary relations R1..R_length with ``n`` distinct values each; every combination joins."""
    rng = random.Random(seed)
    db = Database()
    for i in range(1, length + 1):
        ws = [rng.randint(0, max_weight) if integer_weights else rng.uniform(0, max_weight)
              for _ in range(n)]
        db.add(f"R{i}", [(v,) for v in range(1, n + 1)], ws, arity=1)
    atoms = ", ".join(f"R{i}(x{i})" for i in range(1, length + 1))
    head = ",".join(f"x{i}" for i in range(1, length + 1))
    return Workload(f"cartesian{length}_n{n}_s{seed}", parse_query(f"Q({head}) :- {atoms}"), db)


def running_example() -> Workload:
    """The 3-path database used as the worked example throughout the tests.

    The weight of R2's (2,7) never matters: the tuple has no partner in R3.
    """
    db = Database()
    db.add("R1", [(1, 1), (2, 1), (5, 3), (3, 2), (4, 2)], [1, 2, 3, 5, 6])
    db.add("R2", [(1, 4), (1, 5), (1, 6), (2, 7), (3, 4), (3, 5), (3, 6)],
           [100, 200, 300, 150, 250, 300, 350])
    db.add("R3", [(4, 1), (4, 2), (5, 1), (6, 1)], [10, 20, 30, 40])
    q = parse_query("Q(x1,x2,x3,x4) :- R1(x1,x2), R2(x2,x3), R3(x3,x4)")
    return Workload("running_example", q, db)


# ------------------------------------------------------------------ graphs

def _num(tok):
    try:
        return int(tok)
    except ValueError:
        try:
            return float(tok)
        except ValueError:
            return None


def read_edges(edge_csv) -> list:
    """(src, dst, weight) triples; a missing third column means weight 0."""
    out = []
    with open(edge_csv, newline="", encoding="utf-8") as f:
        for i, row in enumerate(csv.reader(f)):
            if not row or row[0].startswith("#"):
                continue
            if len(row) < 2:
                raise ValueError(f"{edge_csv}: line {i + 1}: expected at least 2 columns")
            u, v = _num(row[0].strip()), _num(row[1].strip())
            if u is None or v is None:
                if i == 0:
                    continue        # header
                raise ValueError(f"{edge_csv}: line {i + 1}: bad node id")
            w = 0
            if len(row) >= 3:
                w = _num(row[2].strip())
                if w is None:
                    raise ValueError(f"{edge_csv}: line {i + 1}: bad weight {row[2]!r}")
            out.append((u, v, w))
    return out


def pagerank(edges, damping: float = 0.85, iterations: int = 50) -> dict:
    nodes = sorted({u for u, _, _ in edges} | {v for _, v, _ in edges})
    n = len(nodes)
    if n == 0:
        return {}
    out: dict = {u: [] for u in nodes}
    for u, v, _ in edges:
        out[u].append(v)
    pr = {u: 1.0 / n for u in nodes}
    for _ in range(iterations):
        dangling = sum(pr[u] for u in nodes if not out[u])
        nxt = {u: (1.0 - damping) / n + damping * dangling / n for u in nodes}
        for u in nodes:
            if out[u]:
                share = damping * pr[u] / len(out[u])
                for v in out[u]:
                    nxt[v] += share
        pr = nxt
    return pr


def gen_graph_query(edge_csv, length: int, weighting: str = "provided"):
    """``length``-path query over copies of the edge relation E."""
    edges = read_edges(edge_csv)
    if weighting == "pagerank":
        pr = pagerank(edges)
        ws = [pr[u] + pr[v] for u, v, _ in edges]
    elif weighting == "provided":
        ws = [w for _, _, w in edges]
    else:
        raise ValueError(f"unknown weighting {weighting!r}")
    db = Database().add("E", [(u, v) for u, v, _ in edges], ws, arity=2)
    q = parse_query("Q(" + ",".join(f"x{i}" for i in range(length + 1)) + ") :- "
                    + ", ".join(f"E(x{i - 1},x{i})" for i in range(1, length + 1)))
    return q, db


# ------------------------------------------------------------------ measurement

def measure_ttk(algo: str, workload: Workload, k_checkpoints, variant: str = "quick",
                timeout_s: float | None = None) -> list:
    """Rows of (k, elapsed_ns, counters) at each checkpoint; times include preprocessing.

    Answers go to a sink; nothing is serialised while timing.  The batch
    algorithm reports a single row at k = number of answers.
    """
    ks = sorted(set(k_checkpoints))
    rows = []
    gc.collect()
    t0 = time.perf_counter_ns()
    tree = gyo_join_tree(workload.query)
    inst = prepare(tree, workload.db, workload.dioid)
    if algo == "batch":
        res = batch_yannakakis_sort(inst)
        el = time.perf_counter_ns() - t0
        return [dict(algo=algo, workload=workload.name, k=len(res), elapsed_ns=el, pq_pops=0,
                     pq_pushes=0, succ_calls=0, max_pq_size=0, timed_out=False)]
    it = make_iterator(inst, algo, variant)
    stats = it.stats
    deadline = None if timeout_s is None else t0 + int(timeout_s * 1e9)
    k = 0
    nxt = 0
    for _ in it:
        k += 1
        while nxt < len(ks) and ks[nxt] == k:
            rows.append(_row(algo, workload, k, time.perf_counter_ns() - t0, stats))
            nxt += 1
        if nxt == len(ks):
            break
        if deadline is not None and (k & 1023) == 0 and time.perf_counter_ns() > deadline:
            rows.append(dict(_row(algo, workload, k, time.perf_counter_ns() - t0, stats),
                             timed_out=True))
            return rows
    if nxt < len(ks):
        # stream ended before the last checkpoint; report where it ended
        rows.append(_row(algo, workload, k, time.perf_counter_ns() - t0, stats))
    return rows


def _row(algo, workload, k, el, stats):
    return dict(algo=algo, workload=workload.name, k=k, elapsed_ns=el, pq_pops=stats.pq_pops,
                pq_pushes=stats.pq_pushes, succ_calls=stats.succ_calls,
                max_pq_size=stats.max_pq_size, timed_out=False)


def write_csv(rows, out=None) -> None:
    w = csv.DictWriter(out or sys.stdout, fieldnames=CSV_FIELDS, extrasaction="ignore",
                       lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
