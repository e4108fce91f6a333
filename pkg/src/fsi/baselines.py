"""Reference intersections: linear merge (the oracle), hash probe and galloping."""
from __future__ import annotations

from typing import Sequence

from fsi.result import Counters, IntersectionResult


def _merge2(a: Sequence[int], b: Sequence[int], counters: Counters) -> list[int]:
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    comparisons = 0
    while i < na and j < nb:
        x, y = a[i], b[j]
        comparisons += 1
        if x < y:
            i += 1
        elif y < x:
            j += 1
        else:
            out.append(x)
            i += 1
            j += 1
    counters.comparisons += comparisons
    return out


def merge_intersect(sets: Sequence[Sequence[int]]) -> IntersectionResult:
    """k-way intersection by iterated two-way merges, smallest set first."""
    if not sets:
        raise ValueError("need at least one set")
    counters = Counters()
    ordered = sorted(sets, key=len)
    acc = list(ordered[0])
    for other in ordered[1:]:
        if not acc:
            break
        acc = _merge2(acc, other, counters)
    return IntersectionResult(acc, counters)


def hash_probe_intersect(sets: Sequence[Sequence[int]]) -> IntersectionResult:
    """Probe each element of the smallest set against hash tables of the rest."""
    if len(sets) < 2:
        raise ValueError("hash probe needs at least two sets")
    ordered = sorted(sets, key=len)
    # CPython sets keep load factor below 3/5
    tables = [set(s) for s in ordered[1:]]
    counters = Counters()
    out = []
    probes = 0
    for x in ordered[0]:
        for tab in tables:
            probes += 1
            if x not in tab:
                break
        else:
            out.append(x)
    counters.comparisons = probes
    return IntersectionResult(out, counters)


def _gallop(b: Sequence[int], lo: int, x: int, counters: Counters) -> int:
    """Smallest index ``i >= lo`` with ``b[i] >= x``."""
    n = len(b)
    step = 1
    hi = lo
    while hi < n:
        counters.comparisons += 1
        if b[hi] >= x:
            break
        lo = hi + 1
        hi += step
        step <<= 1
    hi = min(hi, n)
    while lo < hi:
        mid = (lo + hi) >> 1
        counters.comparisons += 1
        if b[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


def galloping_intersect(a: Sequence[int], b: Sequence[int]) -> IntersectionResult:
    """Two-set SvS: for each element of the smaller set, gallop forward in the larger."""
    if len(a) > len(b):
        a, b = b, a
    counters = Counters()
    out = []
    j = 0
    nb = len(b)
    for x in a:
        j = _gallop(b, j, x, counters)
        if j >= nb:
            break
        if b[j] == x:
            out.append(x)
            j += 1
    return IntersectionResult(out, counters)


def galloping_intersect_k(sets: Sequence[Sequence[int]]) -> IntersectionResult:
    ordered = sorted(sets, key=len)
    counters = Counters()
    acc = list(ordered[0])
    for other in ordered[1:]:
        res = galloping_intersect(acc, other)
        counters.comparisons += res.counters.comparisons
        acc = res.elements
    return IntersectionResult(acc, counters)
