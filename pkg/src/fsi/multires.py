"""Multi-resolution structure: one g-sorted array serving every partition
``g_t`` at once in linear space.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from fsi.core import MACHINE_BITS, Config, HashSuite
from fsi.layout import GroupTable, GroupView, next_same_hash


def ceil_log2(n: int) -> int:
    return (n - 1).bit_length() if n > 1 else 0


def prefix_bounds(gvals: np.ndarray, t: int) -> np.ndarray:
    """Interval bounds of all ``2**t`` prefix groups over sorted g-values."""
    if t == 0:
        return np.array([0, len(gvals)], dtype=np.int64)
    edges = np.arange(1 << t, dtype=np.uint64) << np.uint64(MACHINE_BITS - t)
    bounds = np.searchsorted(gvals, edges, side="left").astype(np.int64)
    return np.append(bounds, len(gvals))


class MultiResIndex:
    def __init__(self, elements: Sequence[int], suite: HashSuite):
        arr = np.asarray(elements, dtype=np.uint64)
        if len(np.unique(arr)) != len(arr):
            raise ValueError("input set contains duplicates")
        self.suite = suite
        self.n = n = len(arr)
        gv = suite.g.many(arr)
        order = np.argsort(gv, kind="stable")
        self._gvals = gv[order]
        els = arr[order]
        self.gvals = self._gvals.tolist()
        self.elements = els.tolist()
        hvals = suite.h.many(els) if n else np.zeros(0, dtype=np.int64)
        self.next = next_same_hash(hvals).tolist()
        self.finest = ceil_log2(n)
        self.tables: list[GroupTable] = [
            GroupTable(hvals, prefix_bounds(self._gvals, t), suite.config.w)
            for t in range(self.finest + 1)
        ] if n else []

    @property
    def config(self) -> Config:
        return self.suite.config

    def clamp(self, t: int) -> int:
        return max(0, min(t, self.finest))

    def _check(self, t: int, z: int) -> None:
        if not self.n:
            raise ValueError("empty index has no groups")
        if not 0 <= t <= self.finest:
            raise ValueError(f"resolution {t} outside [0, {self.finest}]")
        if not 0 <= z < (1 << t):
            raise ValueError(f"group id {z} outside [0, 2**{t})")

    def group(self, t: int, z: int) -> GroupView:
        self._check(t, z)
        return GroupView(self.tables[t], z, self.gvals, self.elements, self.next)

    def group_at(self, t: int, z: int) -> tuple[int, int, int]:
        """``(left, right, image)`` of group ``z`` at resolution ``t``; right is exclusive."""
        self._check(t, z)
        table = self.tables[t]
        return table.bounds[z], table.bounds[z + 1], table.images[z]

    def enumerate_preimage(self, t: int, z: int, y: int) -> list[int]:
        if not 0 <= y < self.config.w:
            raise ValueError(f"bit position {y} outside [0, {self.config.w})")
        view = self.group(t, z)
        return [self.elements[p] for p in view.positions(y)]

    def space_report(self) -> dict[str, int]:
        out = {"gsorted": self.n, "gvalues": self.n, "next": self.n,
               "boundaries": 0, "images": 0, "first_offsets": 0, "first_packed": 0}
        for table in self.tables:
            for k, v in table.words().items():
                out[k] += v
        out["total"] = sum(out.values())
        return out


def build_multires(elements: Sequence[int], config: Config | None = None,
                   suite: HashSuite | None = None) -> MultiResIndex:
    if suite is None:
        suite = HashSuite.from_config(config or Config())
    return MultiResIndex(elements, suite)


def group_at(idx: MultiResIndex, t: int, z: int) -> tuple[int, int, int]:
    return idx.group_at(t, z)


def enumerate_preimage(idx: MultiResIndex, t: int, z: int, y: int) -> list[int]:
    return idx.enumerate_preimage(t, z, y)


def space_report(idx: MultiResIndex) -> dict[str, int]:
    return idx.space_report()
