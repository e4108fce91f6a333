"""Fixed-width partitioning (IntGroup) for two-set intersection.

One naturally sorted array is tiled by groups of every power-of-two size;
the ``next`` chain is shared by all sizes.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from fsi.core import Config, HashSuite
from fsi.layout import GroupTable, GroupView, next_same_hash
from fsi.partition import CollisionStats, intersect_small
from fsi.result import Counters, IntersectionResult


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length() if n > 1 else 0


class FixedWidthIndex:
    def __init__(self, elements: Sequence[int], suite: HashSuite):
        arr = np.unique(np.asarray(elements, dtype=np.uint64))
        if len(arr) != len(elements):
            raise ValueError("input set contains duplicates")
        self.suite = suite
        self.n = n = len(arr)
        self.elements = arr.tolist()
        hvals = suite.h.many(arr) if n else np.zeros(0, dtype=np.int64)
        nxt = next_same_hash(hvals)
        self.next = nxt.tolist()
        top = _ceil_log2(n)
        self.sizes = [1 << j for j in range(min(1, top), top + 1)] if n else []
        self.tables: dict[int, GroupTable] = {}
        for s in self.sizes:
            bounds = np.minimum(np.arange(0, n + s, s, dtype=np.int64), n)
            self.tables[s] = GroupTable(hvals, bounds, suite.config.w)

    @property
    def config(self) -> Config:
        return self.suite.config

    def resolve_size(self, s: int) -> int:
        """Nearest stored size at or above ``s`` (the finest stored size is 2)."""
        for size in self.sizes:
            if size >= s:
                return size
        return self.sizes[-1]

    def groups(self, s: int | None = None) -> list[GroupView]:
        s = self.resolve_size(self.config.s if s is None else s)
        table = self.tables[s]
        return [GroupView(table, z, self.elements, self.elements, self.next)
                for z in range(len(table))]

    def space_words(self) -> dict[str, int]:
        out = {"elements": self.n, "next": self.n,
               "images": 0, "first_offsets": 0, "first_packed": 0}
        for table in self.tables.values():
            words = table.words()
            # fixed-width boundaries are implicit (j * s) and not stored
            for k in ("images", "first_offsets", "first_packed"):
                out[k] += words[k]
        return out

    def stored_groups(self) -> int:
        return sum(len(t) for t in self.tables.values())


def build_intgroup(elements: Sequence[int], config: Config | None = None,
                   suite: HashSuite | None = None) -> FixedWidthIndex:
    if suite is None:
        suite = HashSuite.from_config(config or Config())
    return FixedWidthIndex(elements, suite)


def choose_group_sizes(n1: int, n2: int, w: int) -> tuple[int, int]:
    """Powers of two within ``[s*, 2 s*]`` of ``s1* = sqrt(w n1/n2)``, ``s2* = sqrt(w n2/n1)``."""
    if n1 < 1 or n2 < 1:
        raise ValueError("set sizes must be >= 1")

    def pick(na, nb):
        # smallest power of two s with s*s*nb >= w*na, i.e. s >= s*
        s = 1
        while s * s * nb < w * na:
            s <<= 1
        return min(s, 1 << _ceil_log2(na))

    return pick(n1, n2), pick(n2, n1)


def intersect_intgroup(a: FixedWidthIndex, b: FixedWidthIndex,
                       sizes: tuple[int, int] | None = None) -> IntersectionResult:
    if a.suite.params() != b.suite.params():
        raise ValueError("indexes were built with different hash suites")
    counters = Counters()
    if not a.n or not b.n:
        return IntersectionResult([], counters)
    if sizes is None:
        sizes = choose_group_sizes(a.n, b.n, a.config.w)
    ga, gb = a.groups(sizes[0]), b.groups(sizes[1])
    ea, eb = a.elements, b.elements
    stats = CollisionStats()
    out: list[int] = []
    p = q = 0
    np_, nq = len(ga), len(gb)
    while p < np_ and q < nq:
        gp, gq = ga[p], gb[q]
        lo_p, hi_p = ea[gp.left], ea[gp.right - 1]
        lo_q, hi_q = eb[gq.left], eb[gq.right - 1]
        counters.comparisons += 1
        if lo_q > hi_p:
            p += 1
        elif lo_p > hi_q:
            q += 1
        else:
            counters.tuples_tested += 1
            counters.image_ands += 1
            if gp.image & gq.image:
                counters.tuples_merged += 1
                found = intersect_small(gp, gq, stats)
                out.extend(found)
            else:
                counters.tuples_filtered += 1
            if hi_p < hi_q:
                p += 1
            else:
                q += 1
    counters.same_hash_pairs = stats.pairs_same_hash
    counters.collisions = stats.spurious
    return IntersectionResult(out, counters)
