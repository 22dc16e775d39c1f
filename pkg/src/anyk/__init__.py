"""Ranked enumeration of conjunctive-query answers over selective dioids."""

from .algorithms import (ALGORITHMS, ConfigError, OutputBudgetExceeded, anyk_part,
                         anyk_part_plus, anyk_rec, anyk_union, batch_yannakakis_sort,
                         make_iterator)
from .answers import RankedAnswer
from .database import Database, Relation
from .dpgraph import bottom_up, build_tdp, prepare, top1_solution
from .oracle import oracle_dag_paths, oracle_join_sort
from .projections import NotFreeConnexError, enumerate_all_weight, rewrite_min_weight
from .query import (CyclicError, JoinTree, QuerySyntaxError, gyo_join_tree, is_free_connex,
                    parse_query, serial_decomposition)
from .ranking import MINMAX, PRODUCT, TROPICAL, check_dioid_laws, lexicographic, make_dioid

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS", "ConfigError", "CyclicError", "Database", "JoinTree", "MINMAX",
    "NotFreeConnexError", "OutputBudgetExceeded", "PRODUCT", "QuerySyntaxError",
    "RankedAnswer", "Relation", "TROPICAL", "anyk_part", "anyk_part_plus", "anyk_rec",
    "anyk_union", "batch_yannakakis_sort", "bottom_up", "build_tdp", "check_dioid_laws",
    "enumerate_all_weight", "gyo_join_tree", "is_free_connex", "lexicographic", "make_dioid",
    "make_iterator", "oracle_dag_paths", "oracle_join_sort", "parse_query", "prepare",
    "rewrite_min_weight", "serial_decomposition", "top1_solution",
]
