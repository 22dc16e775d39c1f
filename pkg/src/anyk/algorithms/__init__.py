"""Ranked-enumeration iterators over annotated T-DP instances."""

from __future__ import annotations

from .batch import BatchResult, OutputBudgetExceeded, batch_yannakakis_sort
from .common import AnykIterator, ConfigError, CountingHeap, Stats
from .part import PartIterator, PartPlusIterator, stage_vertices
from .rec import RecIterator
from .successors import SuccessorTable
from .union import UnionIterator


def _check_dioid(inst, d):
    if d is not None and d is not inst.dioid and d != inst.dioid:
        raise ConfigError("dioid differs from the one the instance was built with")


def anyk_part(inst, d=None, variant: str = "quick", audit: bool = False) -> PartIterator:
    _check_dioid(inst, d)
    return PartIterator(inst, variant, audit)


def anyk_rec(inst, d=None) -> RecIterator:
    _check_dioid(inst, d)
    return RecIterator(inst)


def anyk_part_plus(inst, d=None, sd=None, variant: str = "quick") -> PartPlusIterator:
    _check_dioid(inst, d)
    return PartPlusIterator(inst, variant, sd)


def anyk_union(iterators, dioid=None) -> UnionIterator:
    return UnionIterator(iterators, dioid)


ALGORITHMS = ("part", "rec", "part+", "batch")


def make_iterator(inst, algo: str, variant: str = "quick"):
    """Iterator for a named algorithm; ``batch`` yields from the sorted list."""
    if algo == "part":
        return anyk_part(inst, variant=variant)
    if algo == "rec":
        return anyk_rec(inst)
    if algo in ("part+", "partplus"):
        return anyk_part_plus(inst, variant=variant)
    if algo == "batch":
        return iter(batch_yannakakis_sort(inst))
    raise ValueError(f"unknown algorithm {algo!r}")


__all__ = [
    "ALGORITHMS", "AnykIterator", "BatchResult", "ConfigError", "CountingHeap", "OutputBudgetExceeded",
    "PartIterator", "PartPlusIterator", "RecIterator", "Stats", "SuccessorTable",
    "UnionIterator", "anyk_part", "anyk_part_plus", "anyk_rec", "anyk_union",
    "batch_yannakakis_sort", "make_iterator", "stage_vertices",
]
