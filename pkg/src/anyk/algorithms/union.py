"""Merging ranked streams of several instances with duplicate elimination."""

from __future__ import annotations

import dataclasses
import heapq

from .common import AnykIterator, Stats


class UnionIterator(AnykIterator):
    """Top-level heap over the head answers of each member stream.

    Answers are identified by their assignment; later copies are skipped.
    """

    def __init__(self, iterators, dioid=None):
        super().__init__(None)
        given = list(iterators)
        if dioid is None:
            dioid = next((it.inst.dioid for it in given if getattr(it, "inst", None)), None)
        self.members = [iter(it) for it in given]
        self.key = dioid.key if dioid is not None else (lambda w: w)
        self.heap = []
        self.seen = set()
        self.duplicates = 0
        for i, it in enumerate(self.members):
            self._pull(i)

    def _pull(self, i):
        ans = next(self.members[i], None)
        if ans is not None:
            heapq.heappush(self.heap, (self.key(ans.weight), i, ans.rank, ans))
            self.stats.pq_pushes += 1
            self.stats.max_pq_size = max(self.stats.max_pq_size, len(self.heap))

    def _next(self):
        while self.heap:
            _, i, _, ans = heapq.heappop(self.heap)
            self.stats.pq_pops += 1
            self._pull(i)
            ident = tuple(sorted(ans.assignment.items(), key=lambda kv: kv[0]))
            if ident in self.seen:
                self.duplicates += 1
                continue
            self.seen.add(ident)
            self.rank += 1
            return dataclasses.replace(ans, rank=self.rank)
        return None

    def member_stats(self) -> list[Stats]:
        return [it.stats for it in self.members]
