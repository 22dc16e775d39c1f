"""Shared iterator plumbing: counters, heaps, the iterator base class."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, fields

from ..dpgraph import RankedAnswer, TdpInstance


class ConfigError(ValueError):
    pass


@dataclass
class Stats:
    pq_pushes: int = 0
    pq_pops: int = 0
    succ_calls: int = 0
    max_pq_size: int = 0
    # sum over queue operations of bit_length(queue size): a comparison-count proxy
    pq_cost: int = 0
    init_inserts: int = 0

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


class CountingHeap:
    """Binary heap of ``(key, seq, payload)`` entries with operation counters."""

    __slots__ = ("h", "stats", "seq")

    def __init__(self, stats: Stats):
        self.h = []
        self.stats = stats
        self.seq = 0

    def push(self, key, payload):
        h = self.h
        self.seq += 1
        heapq.heappush(h, (key, self.seq, payload))
        st = self.stats
        n = len(h)
        st.pq_pushes += 1
        st.pq_cost += n.bit_length()
        if n > st.max_pq_size:
            st.max_pq_size = n

    def pop(self):
        h = self.h
        st = self.stats
        st.pq_pops += 1
        st.pq_cost += len(h).bit_length()
        return heapq.heappop(h)

    def __len__(self):
        return len(self.h)


class AnykIterator:
    """Pull-based ranked stream; exhausted iterators keep raising StopIteration."""

    def __init__(self, inst: TdpInstance | None):
        self.inst = inst
        self.stats = Stats()
        self.rank = 0
        self.done = False

    def __iter__(self):
        return self

    def _next(self) -> RankedAnswer | None:
        raise NotImplementedError

    def __next__(self) -> RankedAnswer:
        if self.done:
            raise StopIteration
        ans = self._next()
        if ans is None:
            self.done = True
            raise StopIteration
        return ans

    def take(self, k: int) -> list:
        out = []
        for ans in self:
            out.append(ans)
            if len(out) >= k:
                break
        return out


def require_ready(inst: TdpInstance):
    if not inst.ready:
        raise ConfigError("run bottom_up on the instance first")
