"""Name -> (prepare, run) dispatch over every intersection algorithm."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Sequence

from fsi.baselines import galloping_intersect_k, hash_probe_intersect, merge_intersect
from fsi.core import HashSuite
from fsi.hashbin import GSortedView, intersect_hashbin
from fsi.intgroup import FixedWidthIndex, intersect_intgroup
from fsi.multires import MultiResIndex
from fsi.rangroup import EQUAL_COUNT, EQUAL_SIZE, intersect_ran2, intersect_rank
from fsi.ranscan import build_scan, intersect_scan
from fsi.result import IntersectionResult


@dataclass(frozen=True)
class Algorithm:
    name: str
    prepare: Callable[[Sequence[int], HashSuite], Any]
    run: Callable[[list], IntersectionResult]
    max_k: int | None = None
    index_kind: str | None = None


def _plain(elements, suite):
    return list(elements)


def _ran2(mode):
    def run(ixs):
        if len(ixs) == 2:
            return intersect_ran2(ixs[0], ixs[1], mode)
        if mode == EQUAL_SIZE:
            return intersect_rank(ixs)
        raise ValueError("equal-count mode is defined for two sets only")
    return run


ALGORITHMS: dict[str, Algorithm] = {a.name: a for a in [
    Algorithm("merge", _plain, merge_intersect),
    Algorithm("hash", _plain, hash_probe_intersect),
    Algorithm("galloping", _plain, galloping_intersect_k),
    Algorithm("intgroup", FixedWidthIndex, lambda ixs: intersect_intgroup(*ixs), 2, "intgroup"),
    Algorithm("rangroup", MultiResIndex, _ran2(EQUAL_SIZE), None, "multires"),
    Algorithm("rangroup-count", MultiResIndex, _ran2(EQUAL_COUNT), 2, "multires"),
    Algorithm("ranscan", lambda e, s: build_scan(e, suite=s), intersect_scan, None, "ranscan-raw"),
    Algorithm("ranscan-lowbits", lambda e, s: build_scan(e, suite=s, compressed=True),
              intersect_scan, None, "ranscan-compressed"),
    Algorithm("hashbin", MultiResIndex,
              lambda ixs: intersect_hashbin(*[GSortedView(ix) for ix in ixs]), None, "multires"),
]}

INDEX_ALGOS = {
    "intgroup": ("intgroup",),
    "multires": ("rangroup", "rangroup-count", "hashbin"),
    "ranscan-raw": ("ranscan",),
    "ranscan-compressed": ("ranscan-lowbits", "ranscan"),
}


def get(name: str) -> Algorithm:
    try:
        return ALGORITHMS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}") from None


def supports(algo: Algorithm, k: int) -> bool:
    return algo.max_k is None or k <= algo.max_k


def intersect_sets(name: str, sets: Sequence[Sequence[int]], suite: HashSuite) -> IntersectionResult:
    algo = get(name)
    if not supports(algo, len(sets)):
        raise ValueError(f"{name} handles at most {algo.max_k} sets")
    return algo.run([algo.prepare(s, suite) for s in sets])
