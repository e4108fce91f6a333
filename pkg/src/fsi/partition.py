"""Small groups, their hash images and inverted mappings, and the
IntersectSmall kernels.

The kernels accept any group-like object exposing

* ``image``: the word bitmap of h over the group,
* ``keys`` / ``elements``: indexable sequences (order key, element),
* ``positions(y)``: indices into ``keys`` of the elements hashing to ``y``,
  ascending by order key.

:class:`Group` is the explicit reference layout; the index modules hand
out lightweight views over their shared arrays instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from fsi.core import HashFn, PermFn, bitmap_enumerate, prefix


@dataclass(frozen=True)
class Group:
    elements: tuple[int, ...]
    keys: tuple[int, ...]
    image: int
    inverted_positions: dict[int, tuple[int, ...]] = field(repr=False)

    @property
    def lo(self) -> int:
        return self.keys[0]

    @property
    def hi(self) -> int:
        return self.keys[-1]

    @property
    def inverted(self) -> dict[int, list[int]]:
        """Bit position to the group's elements hashing there, in key order."""
        return {y: [self.elements[i] for i in pos] for y, pos in self.inverted_positions.items()}

    def positions(self, y: int) -> tuple[int, ...]:
        return self.inverted_positions.get(y, ())

    def __len__(self):
        return len(self.elements)


@dataclass
class CollisionStats:
    pairs_same_hash: int = 0
    matches: int = 0

    @property
    def spurious(self) -> int:
        return self.pairs_same_hash - self.matches


def summarize_group(elements: Sequence[int], h: HashFn,
                    keys: Sequence[int] | None = None) -> Group:
    if not elements:
        raise ValueError("cannot summarize an empty group")
    keys = tuple(elements) if keys is None else tuple(keys)
    inverted: dict[int, list[int]] = {}
    image = 0
    for i, x in enumerate(elements):
        y = h(x)
        image |= 1 << y
        inverted.setdefault(y, []).append(i)
    return Group(tuple(elements), keys, image,
                 {y: tuple(p) for y, p in inverted.items()})


def partition_fixed(sorted_set: Sequence[int], s: int) -> list[list[int]]:
    if s < 1:
        raise ValueError("group size must be >= 1")
    return [list(sorted_set[i:i + s]) for i in range(0, len(sorted_set), s)]


def partition_by_prefix(elements: Sequence[int], g: PermFn, t: int) -> dict[int, list[int]]:
    """Group elements by the ``t``-bit prefix of ``g(x)``; each group in g-order."""
    if t < 0:
        raise ValueError("t must be >= 0")
    groups: dict[int, list[tuple[int, int]]] = {}
    for x in elements:
        gx = g(x)
        groups.setdefault(prefix(gx, t), []).append((gx, x))
    return {z: [x for _, x in sorted(members)] for z, members in sorted(groups.items())}


def summarize_prefix_groups(elements: Sequence[int], g: PermFn, t: int,
                            h: HashFn) -> dict[int, Group]:
    out = {}
    for z, members in partition_by_prefix(elements, g, t).items():
        out[z] = summarize_group(members, h, keys=[g(x) for x in members])
    return out


def _merge_positions(pa, ka, pb, kb, emit: Callable[[int], None]) -> None:
    i = j = 0
    na, nb = len(pa), len(pb)
    while i < na and j < nb:
        x, y = ka[pa[i]], kb[pb[j]]
        if x < y:
            i += 1
        elif y < x:
            j += 1
        else:
            emit(pa[i])
            i += 1
            j += 1


def intersect_small(a, b, stats: CollisionStats | None = None) -> list[int]:
    """Exact ``a ∩ b`` via the AND of images and per-bit inverted-list merges."""
    if stats is None:
        stats = CollisionStats()
    hits: list[int] = []
    common = a.image & b.image
    if not common:
        return []
    ka, kb = a.keys, b.keys
    for y in bitmap_enumerate(common):
        pa, pb = a.positions(y), b.positions(y)
        stats.pairs_same_hash += len(pa) * len(pb)
        _merge_positions(pa, ka, pb, kb, hits.append)
    stats.matches += len(hits)
    els = a.elements
    out = [els[i] for i in hits]
    if len(out) > 1:
        order = sorted(range(len(hits)), key=lambda i: ka[hits[i]])
        out = [out[i] for i in order]
    return out


def intersect_small_k(groups: Sequence, stats: CollisionStats | None = None,
                      common: int | None = None) -> list[int]:
    """k-group IntersectSmall; ``common`` may carry a precomputed image AND."""
    if not groups:
        raise ValueError("need at least one group")
    if stats is None:
        stats = CollisionStats()
    first = groups[0]
    if len(groups) == 1:
        pos = [p for y in bitmap_enumerate(first.image) for p in first.positions(y)]
        pos.sort(key=lambda p: first.keys[p])
        stats.matches += len(pos)
        return [first.elements[p] for p in pos]
    if common is None:
        common = first.image
        for grp in groups[1:]:
            common &= grp.image
    if not common:
        return []
    hits: list[tuple[int, int]] = []
    k0 = first.keys
    for y in bitmap_enumerate(common):
        lists = [grp.positions(y) for grp in groups]
        tuples = 1
        for p in lists:
            tuples *= len(p)
        stats.pairs_same_hash += tuples
        idx = [0] * len(groups)
        lens = [len(p) for p in lists]
        # advance every cursor to the current maximum key until all agree
        while all(idx[i] < lens[i] for i in range(len(groups))):
            cur = [groups[i].keys[lists[i][idx[i]]] for i in range(len(groups))]
            top = max(cur)
            if all(c == top for c in cur):
                hits.append((top, lists[0][idx[0]]))
                for i in range(len(groups)):
                    idx[i] += 1
            else:
                for i in range(len(groups)):
                    if cur[i] < top:
                        idx[i] += 1
    stats.matches += len(hits)
    hits.sort()
    return [first.elements[p] for _, p in hits]
