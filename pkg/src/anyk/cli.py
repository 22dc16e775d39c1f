"""Command-line entry point: ``anyk run|verify|bench|gen``."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from collections import Counter

from .algorithms import ALGORITHMS, ConfigError, OutputBudgetExceeded, anyk_union, make_iterator
from .bench import gen_cartesian, gen_graph_query, measure_ttk, path_query, synthetic_workload
from .bench import Workload, gen_synthetic, write_csv
from .database import ArityError, MissingRelationError
from .decomposition import DecompositionError, parse_decomposition, union_instances
from .dpgraph import prepare
from .ingest import (IngestError, Interner, apply_attribute_weights, load_database,
                     read_attribute_weights)
from .oracle import OracleCapExceeded, oracle_join_sort
from .projections import NotFreeConnexError, rewrite_min_weight
from .query import CyclicError, QuerySyntaxError, gyo_join_tree, parse_query
from .ranking import make_dioid

EXIT_IO = 1
EXIT_CYCLIC = 2
EXIT_CONFIG = 3
EXIT_MISMATCH = 4


class CliError(Exception):
    def __init__(self, msg, code):
        super().__init__(msg)
        self.code = code


# ------------------------------------------------------------------ output

def _json_weight(w):
    if isinstance(w, tuple):
        return [_json_weight(x) for x in w]
    if isinstance(w, float) and math.isinf(w):
        return "inf" if w > 0 else "-inf"
    return w


def _json_value(x, interner):
    x = interner.decode(x)
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def answer_line(ans, interner, witness=False) -> str:
    rec = {"rank": ans.rank, "weight": _json_weight(ans.weight),
           "answer": {v: _json_value(x, interner) for v, x in ans.assignment.items()}}
    if witness and ans.witness is not None:
        rec["witness"] = [[_json_value(x, interner) for x in row] for row in ans.witness]
    return json.dumps(rec, separators=(",", ":"), allow_nan=False)


# ------------------------------------------------------------------ loading

def _parse_k(s):
    if s == "all":
        return None
    try:
        k = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'all', got {s!r}") from None
    if k < 0:
        raise argparse.ArgumentTypeError("k must be non-negative")
    return k


def _dioid(args):
    return make_dioid(args.ranking, args.lex_dim)


def _load(args, d):
    try:
        with open(args.query, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise CliError(f"cannot read query: {e}", EXIT_IO) from None
    interner = Interner()
    try:
        q = interner.encode_query(parse_query(text))
        mode = "unit" if args.weights == "attribute" else args.weights
        db = load_database(q, args.data_dir, mode, args.header, interner, d)
        if args.weights == "attribute":
            if not args.attribute_file:
                raise CliError("--weights attribute needs --attribute-file", EXIT_IO)
            attr = read_attribute_weights(args.attribute_file, interner, d)
            q, db = apply_attribute_weights(q, db, attr, d)
    except (OSError, IngestError, MissingRelationError, ArityError, QuerySyntaxError) as e:
        raise CliError(str(e), EXIT_IO) from None
    return q, db, interner


def _stream(args, q, db, d):
    """Ranked answers of the query as selected by the flags."""
    if args.algo == "part+" and not d.is_strong:
        raise ConfigError(f"PART+ requires a StrongSubsetMonotone dioid; {d.name!r} is "
                          f"{d.monotonicity_class.value}")
    if args.decomposition:
        try:
            with open(args.decomposition, encoding="utf-8") as f:
                members = parse_decomposition(f.read())
        except OSError as e:
            raise CliError(f"cannot read decomposition: {e}", EXIT_IO) from None
        insts = union_instances(q, members, db, d)
        return anyk_union([make_iterator(i, args.algo, args.variant) for i in insts], d)
    if args.semantics == "minweight" and not q.is_full:
        inst = rewrite_min_weight(q, db, d)
    else:
        inst = prepare(gyo_join_tree(q), db, d, answer_vars=q.free_vars)
    return make_iterator(inst, args.algo, args.variant)


# ------------------------------------------------------------------ commands

def cmd_run(args) -> int:
    d = _dioid(args)
    if args.algo == "part+" and not d.is_strong:
        _stream(args, None, None, d)        # raises the configuration error
    q, db, interner = _load(args, d)
    if args.k == 0:
        return 0
    out = sys.stdout
    n = 0
    for ans in _stream(args, q, db, d):
        out.write(answer_line(ans, interner, args.witness))
        out.write("\n")
        n += 1
        if args.k is not None and n >= args.k:
            break
    out.flush()
    return 0


def _same_weight(a, b):
    # float sums may associate differently from the oracle's
    if isinstance(a, tuple):
        return len(a) == len(b) and all(_same_weight(x, y) for x, y in zip(a, b))
    if isinstance(a, float) or isinstance(b, float):
        return a == b or math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-9)
    return a == b


def cmd_verify(args) -> int:
    d = _dioid(args)
    q, db, interner = _load(args, d)
    semantics = "minweight" if (args.semantics == "minweight" and not q.is_full) else "allweights"
    try:
        expected = oracle_join_sort(q, db, d, semantics, cap=args.oracle_cap)
    except OracleCapExceeded as e:
        raise CliError(f"oracle: {e}", EXIT_IO) from None
    k = len(expected) if args.k is None else min(args.k, len(expected))
    algos = ALGORITHMS if args.algos == "all" else args.algos.split(",")
    ok_all = True
    for algo in algos:
        if algo == "part+" and not d.is_strong:
            continue
        args.algo = algo
        got = []
        for ans in _stream(args, q, db, d):
            got.append(ans)
            if len(got) >= k:
                break
        ws_ok = len(got) == k and all(
            _same_weight(a.weight, b.weight) for a, b in zip(got, expected))
        full = k == len(expected)
        # witnesses are comparable as a multiset only over a complete enumeration
        wit_ok = True
        if full and not args.decomposition:
            if semantics == "allweights":
                wit_ok = Counter(a.witness for a in got) == Counter(a.witness for a in expected)
            else:
                wit_ok = (Counter(tuple(sorted(a.assignment.items())) for a in got)
                          == Counter(tuple(sorted(a.assignment.items())) for a in expected))
        ok = ws_ok and wit_ok
        ok_all &= ok
        print(json.dumps({"algo": algo, "checked": len(got), "weights_match": ws_ok,
                          "witnesses_match": wit_ok if full else None, "ok": ok},
                         separators=(",", ":")))
    return 0 if ok_all else EXIT_MISMATCH


def cmd_bench(args) -> int:
    if args.workload == "synthetic":
        wl = synthetic_workload(args.n, args.length, args.divisor, args.seed)
    elif args.workload == "cartesian":
        wl = gen_cartesian(args.n, args.length, args.seed)
    else:
        if not args.edges:
            raise CliError("--workload graph needs --edges", EXIT_IO)
        try:
            q, db = gen_graph_query(args.edges, args.length, args.weighting)
        except (OSError, ValueError) as e:
            raise CliError(str(e), EXIT_IO) from None
        wl = Workload(f"graph{args.length}_{os.path.basename(args.edges)}", q, db)
    ks = [int(x) for x in args.ks.split(",") if x]
    rows = []
    for algo in args.algos.split(","):
        rows.extend(measure_ttk(algo, wl, ks, args.variant, args.timeout))
    write_csv(rows, sys.stdout)
    return 0


def cmd_gen(args) -> int:
    db = gen_synthetic(args.n, args.length, args.divisor, args.seed,
                       integer_weights=args.integer_weights)
    try:
        os.makedirs(args.out, exist_ok=True)
        for name, rel in db.relations.items():
            with open(os.path.join(args.out, f"{name}.csv"), "w", encoding="utf-8") as f:
                for row, w in rel:
                    f.write(",".join(map(str, row)) + f",{w!r}\n")
        with open(os.path.join(args.out, "query.txt"), "w", encoding="utf-8") as f:
            f.write(str(path_query(args.length)) + "\n")
    except OSError as e:
        raise CliError(str(e), EXIT_IO) from None
    return 0


# ------------------------------------------------------------------ parser

def _data_flags(p):
    p.add_argument("query", help="file holding one Datalog-style rule")
    p.add_argument("data_dir", help="directory with <relation>.csv files")
    p.add_argument("--ranking", choices=["sum", "max", "lex", "prod"], default="sum")
    p.add_argument("--lex-dim", type=int, default=2, help="vector length for --ranking lex")
    p.add_argument("--semantics", choices=["minweight", "allweights"], default="allweights")
    p.add_argument("--weights", choices=["last", "unit", "attribute"], default="last",
                   help="where tuple weights come from")
    p.add_argument("--attribute-file", help="variable,value,weight lines for --weights attribute")
    p.add_argument("--header", action="store_true", help="data files start with a header row")
    p.add_argument("--decomposition", help="member bags for a cyclic query, merged by a union")
    p.add_argument("--variant", choices=["eager", "lazy", "quick"], default="quick")
    p.add_argument("--k", type=_parse_k, default=None, help="number of answers or 'all'")
    p.add_argument("--seed", type=int, default=0, help="accepted for reproducibility; "
                   "enumeration itself is deterministic")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="anyk", description="Ranked enumeration of join answers.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="stream ranked answers as NDJSON")
    _data_flags(p)
    p.add_argument("--algo", choices=list(ALGORITHMS), default="part")
    p.add_argument("--witness", action="store_true", help="include witness tuples")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="compare algorithm streams with the brute-force oracle")
    _data_flags(p)
    p.add_argument("--algos", default="all", help="comma-separated list or 'all'")
    p.add_argument("--oracle-cap", type=int, default=10 ** 6)
    p.set_defaults(func=cmd_verify, algo="part")

    p = sub.add_parser("bench", help="TT(k) measurements as CSV")
    p.add_argument("--workload", choices=["synthetic", "cartesian", "graph"], default="synthetic")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--length", type=int, default=4)
    p.add_argument("--divisor", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--edges", help="edge CSV for --workload graph")
    p.add_argument("--weighting", choices=["provided", "pagerank"], default="provided")
    p.add_argument("--algos", default="part,rec,part+")
    p.add_argument("--ks", default="1,10,100,1000")
    p.add_argument("--variant", choices=["eager", "lazy", "quick"], default="quick")
    p.add_argument("--timeout", type=float, default=None, help="seconds per algorithm")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="write a synthetic path workload")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--length", type=int, default=4)
    p.add_argument("--divisor", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--integer-weights", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"anyk: {e}", file=sys.stderr)
        return e.code
    except (CyclicError, NotFreeConnexError) as e:
        hint = " (pass --decomposition)" if isinstance(e, CyclicError) else ""
        print(f"anyk: {e}{hint}", file=sys.stderr)
        return EXIT_CYCLIC
    except (ConfigError, DecompositionError) as e:
        print(f"anyk: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except BrokenPipeError:
        return 0
    except (OSError, MissingRelationError, ArityError, IngestError, OutputBudgetExceeded) as e:
        print(f"anyk: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
