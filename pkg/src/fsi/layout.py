"""Interval groups over one ordered array with implicit inverted mappings.

Elements live in a single array ordered by their order key. A group is an
interval ``[bounds[z], bounds[z+1])``. For every position, ``next`` points
to the next position on the right with the same h-value (or ``n``). For
every group and every set bit ``y`` of its image, the offset of the first
element hashing to ``y`` is bit-packed at ``bit_length(group size)`` bits.
Walking ``first`` then ``next`` until leaving the interval yields
``h^-1(y, group)`` in key order.
"""
from __future__ import annotations

import numpy as np

from fsi.bits import pack_fields, read_bits


def next_same_hash(hvals: np.ndarray) -> np.ndarray:
    n = len(hvals)
    nxt = np.full(n, n, dtype=np.int64)
    if n < 2:
        return nxt
    order = np.lexsort((np.arange(n), hvals))
    same = hvals[order[1:]] == hvals[order[:-1]]
    nxt[order[:-1][same]] = order[1:][same]
    return nxt


def bit_length(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    out = np.zeros(a.shape, dtype=np.int64)
    pos = a > 0
    out[pos] = np.floor(np.log2(a[pos])).astype(np.int64) + 1
    # float log2 can be off by one just below a power of two
    out[pos] -= (np.left_shift(1, out[pos] - 1) > a[pos])
    out[pos] += (np.left_shift(1, out[pos]) <= a[pos])
    return out


class GroupTable:
    """Images and packed first offsets for one tiling of the ordered array."""

    __slots__ = ("bounds", "images", "first_bits", "first_off", "first_nbits", "widths")

    def __init__(self, hvals: np.ndarray, bounds: np.ndarray, w: int):
        bounds = np.asarray(bounds, dtype=np.int64)
        ngroups = len(bounds) - 1
        sizes = np.diff(bounds)
        gid = np.repeat(np.arange(ngroups, dtype=np.int64), sizes)
        code = gid * w + hvals.astype(np.int64)
        uniq, first_idx = np.unique(code, return_index=True)
        ug, uy = uniq // w, uniq % w
        images = np.zeros(ngroups, dtype=np.uint64)
        np.bitwise_or.at(images, ug, np.left_shift(np.uint64(1), uy.astype(np.uint64)))
        widths = bit_length(sizes)
        per_group_bits = np.bincount(ug, minlength=ngroups).astype(np.int64) * widths
        self.first_bits, self.first_nbits = pack_fields(first_idx - bounds[ug], widths[ug])
        self.first_off = np.concatenate([[0], np.cumsum(per_group_bits)]).tolist()
        self.bounds = bounds.tolist()
        self.images = images.tolist()
        self.widths = widths.tolist()

    def __len__(self):
        return len(self.images)

    def first(self, z: int, y: int) -> int | None:
        """Absolute position of the first element of group ``z`` hashing to ``y``."""
        image = self.images[z]
        if not (image >> y) & 1:
            return None
        rank = (image & ((1 << y) - 1)).bit_count()
        width = self.widths[z]
        delta = read_bits(self.first_bits, self.first_off[z] + rank * width, width)
        return self.bounds[z] + delta

    def words(self) -> dict[str, int]:
        g = len(self.images)
        return {
            "boundaries": g + 1,
            "images": g,
            "first_offsets": g + 1,
            "first_packed": -(-self.first_nbits // 64),
        }


class GroupView:
    """One interval group, shaped for the IntersectSmall kernels."""

    __slots__ = ("table", "z", "left", "right", "image", "keys", "elements", "nxt")

    def __init__(self, table: GroupTable, z: int, keys, elements, nxt):
        self.table = table
        self.z = z
        self.left = table.bounds[z]
        self.right = table.bounds[z + 1]
        self.image = table.images[z]
        self.keys = keys
        self.elements = elements
        self.nxt = nxt

    def positions(self, y: int) -> list[int]:
        p = self.table.first(self.z, y)
        if p is None:
            return []
        out = []
        right, nxt = self.right, self.nxt
        while p < right:
            out.append(p)
            p = nxt[p]
        return out

    def __len__(self):
        return self.right - self.left
