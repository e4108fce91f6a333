"""HashBin: intersection of a small set with much larger ones by binary
search inside matching prefix groups of the g-sorted arrays."""
from __future__ import annotations

from fsi.core import MACHINE_BITS
from fsi.multires import MultiResIndex, ceil_log2
from fsi.result import Counters, IntersectionResult


class GSortedView:
    """The g-sorted element array of a multi-resolution index."""

    def __init__(self, index: MultiResIndex):
        self.index = index
        self.gvals = index.gvals
        self.elements = index.elements
        self.n = index.n

    @property
    def suite(self):
        return self.index.suite


def _lower_bound(keys, lo: int, hi: int, x: int, counters: Counters | None = None) -> int:
    probes = 0
    while lo < hi:
        mid = (lo + hi) >> 1
        probes += 1
        if keys[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    if counters is not None:
        counters.boundary_probes += probes
    return lo


def interval_of(view: GSortedView, t: int, z: int, counters: Counters | None = None) -> tuple[int, int]:
    """``[left, right)`` of the prefix group ``z`` at resolution ``t``, found by search."""
    if not 0 <= t <= MACHINE_BITS:
        raise ValueError(f"resolution {t} outside [0, {MACHINE_BITS}]")
    if t == 0:
        return 0, view.n
    shift = MACHINE_BITS - t
    left = _lower_bound(view.gvals, 0, view.n, z << shift, counters)
    right = _lower_bound(view.gvals, left, view.n, (z + 1) << shift, counters)
    return left, right


def _contains(keys, lo: int, hi: int, x: int, counters: Counters) -> bool:
    cmp = 0
    while lo < hi:
        mid = (lo + hi) >> 1
        v = keys[mid]
        cmp += 1
        if v == x:
            counters.comparisons += cmp
            return True
        if v < x:
            lo = mid + 1
        else:
            hi = mid
    counters.comparisons += cmp
    return False


def intersect_hashbin(*views: GSortedView) -> IntersectionResult:
    """Walk the smallest set's prefix runs at ``t = ceil(log2 n1)``; for each
    element search its g-value in the matching group of every other set,
    stopping at the first miss."""
    if len(views) < 2:
        raise ValueError("HashBin needs at least two sets")
    params = views[0].suite.params()
    if any(v.suite.params() != params for v in views[1:]):
        raise ValueError("views were built with different hash suites")
    counters = Counters()
    ordered = sorted(views, key=lambda v: v.n)
    small, rest = ordered[0], ordered[1:]
    if not small.n:
        return IntersectionResult([], counters)
    t = ceil_log2(small.n)
    shift = MACHINE_BITS - t
    sg = small.gvals
    found = []
    i = 0
    while i < small.n:
        z = sg[i] >> shift
        run_end = i + 1
        while run_end < small.n and sg[run_end] >> shift == z:
            run_end += 1
        counters.tuples_tested += 1
        spans = [interval_of(v, t, z, counters) for v in rest]
        if any(lo == hi for lo, hi in spans):
            counters.tuples_filtered += 1
            i = run_end
            continue
        for p in range(i, run_end):
            x = sg[p]
            for v, (lo, hi) in zip(rest, spans):
                if not _contains(v.gvals, lo, hi, x, counters):
                    break
            else:
                found.append(small.elements[p])
        i = run_end
    found.sort()
    return IntersectionResult(found, counters)
