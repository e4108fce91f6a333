"""Randomized-partition intersection over multi-resolution indexes."""
from __future__ import annotations

import math
from typing import Sequence

from fsi.multires import MultiResIndex, ceil_log2
from fsi.partition import CollisionStats, intersect_small, intersect_small_k
from fsi.result import Counters, IntersectionResult

EQUAL_COUNT = "equal-count"
EQUAL_SIZE = "equal-size"
MODES = (EQUAL_COUNT, EQUAL_SIZE)


def size_resolution(n: int, w: int) -> int:
    """``ceil(log2(n / sqrt(w)))`` clamped at 0."""
    s = math.isqrt(w)
    return ceil_log2(-(-n // s)) if n > s else 0


def count_resolution(n1: int, n2: int, w: int) -> int:
    """``ceil(log2(sqrt(n1 n2 / w)))`` clamped at 0."""
    # smallest t with 4**t * w >= n1 * n2
    t = 0
    while (1 << (2 * t)) * w < n1 * n2:
        t += 1
    return t


def _check_suites(indexes: Sequence[MultiResIndex]) -> None:
    params = indexes[0].suite.params()
    if any(ix.suite.params() != params for ix in indexes[1:]):
        raise ValueError("indexes were built with different hash suites")


def _finish(keys_elements: list[int], counters: Counters, stats: CollisionStats) -> IntersectionResult:
    counters.same_hash_pairs = stats.pairs_same_hash
    counters.collisions = stats.spurious
    keys_elements.sort()
    return IntersectionResult(keys_elements, counters)


def plan_ran2(n1: int, n2: int, w: int, mode: str) -> tuple[int, int]:
    if mode == EQUAL_COUNT:
        t = count_resolution(n1, n2, w)
        return t, t
    if mode == EQUAL_SIZE:
        return size_resolution(n1, w), size_resolution(n2, w)
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def intersect_ran2(a: MultiResIndex, b: MultiResIndex, mode: str = EQUAL_SIZE) -> IntersectionResult:
    _check_suites([a, b])
    if a.n > b.n:
        a, b = b, a
    counters = Counters()
    if not a.n:
        return IntersectionResult([], counters)
    w = a.config.w
    t1, t2 = plan_ran2(a.n, b.n, w, mode)
    t1, t2 = a.clamp(t1), b.clamp(t2)
    stats = CollisionStats()
    out: list[int] = []
    ta, tb = a.tables[t1], b.tables[t2]
    a_img, b_img = ta.images, tb.images
    shift = t2 - t1
    for z2 in range(1 << t2):
        z1 = z2 >> shift
        counters.tuples_tested += 1
        counters.image_ands += 1
        if not a_img[z1] & b_img[z2]:
            counters.tuples_filtered += 1
            continue
        counters.tuples_merged += 1
        found = intersect_small(a.group(t1, z1), b.group(t2, z2), stats)
        if not found:
            counters.false_positives += 1
        out.extend(found)
    return _finish(out, counters, stats)


def intersect_rank(indexes: Sequence[MultiResIndex]) -> IntersectionResult:
    """k-set randomized partitioning with a memo stack of partial image ANDs."""
    if len(indexes) < 2:
        raise ValueError("k-set intersection needs at least two indexes")
    _check_suites(indexes)
    counters = Counters()
    ixs = sorted(indexes, key=lambda ix: ix.n)
    if not ixs[0].n:
        return IntersectionResult([], counters)
    k = len(ixs)
    w = ixs[0].config.w
    ts = [ix.clamp(size_resolution(ix.n, w)) for ix in ixs]
    tk = ts[-1]
    shifts = [tk - t for t in ts]
    images = [ix.tables[t].images for ix, t in zip(ixs, ts)]
    stats = CollisionStats()
    out: list[int] = []

    # memo[j] = AND of images of sets 0..j for the current prefixes
    memo = [0] * k
    cur = [-1] * k
    zk = 0
    limit = 1 << tk
    while zk < limit:
        counters.tuples_tested += 1
        # lowest depth whose group id changed; everything above it changes too
        depth = 0
        while depth < k and cur[depth] == zk >> shifts[depth]:
            depth += 1
        acc = memo[depth - 1] if depth else -1
        dead = -1
        for j in range(depth, k):
            zj = zk >> shifts[j]
            cur[j] = zj
            acc = images[j][zj] if j == 0 else acc & images[j][zj]
            if j:
                counters.image_ands += 1
            memo[j] = acc
            if not acc:
                dead = j
                break
        if dead >= 0:
            counters.tuples_filtered += 1
            # every z_k sharing the dead prefix is filtered as well
            for j in range(dead + 1, k):
                cur[j] = -1
            zk = ((zk >> shifts[dead]) + 1) << shifts[dead]
            continue
        counters.tuples_merged += 1
        groups = [ix.group(t, zk >> s) for ix, t, s in zip(ixs, ts, shifts)]
        found = intersect_small_k(groups, stats, common=acc)
        if not found:
            counters.false_positives += 1
        out.extend(found)
        zk += 1
    return _finish(out, counters, stats)
