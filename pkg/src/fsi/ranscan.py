"""RanGroupScan: single-resolution blocks, m-fold image filtering and
linear-merge fallback, with an optional lowbits-compressed layout.

Raw layout: blocks for every ``z`` in ``[0, 2**t)`` (empty ones included),
each holding ``len``, ``m`` image words and the block's elements in g-order.
``z`` is the block ordinal and is not stored.

Compressed stream, MSB first, for ``z = 0 .. 2**t - 1``:

* ``len`` in unary: ``len`` one-bits then a zero,
* if ``len > 0``: ``m`` images of ``w`` bits each,
* ``len`` values of ``g(x) mod 2**(64 - t)`` at ``64 - t`` bits each.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from fsi.bits import BitReader, TruncatedStream, pack_fields, read_bits
from fsi.core import MACHINE_BITS, Config, HashSuite
from fsi.multires import prefix_bounds
from fsi.rangroup import size_resolution
from fsi.result import Counters, IntersectionResult

UNARY_CHUNK = 63


@dataclass(frozen=True)
class RawBlock:
    z: int
    gvals: tuple[int, ...]
    images: tuple[int, ...]

    def __len__(self):
        return len(self.gvals)


class ScanIndex:
    compressed = False

    def __init__(self, n: int, t: int, suite: HashSuite, bounds: list[int],
                 gvals: list[int], images: list[list[int]]):
        self.n, self.t, self.suite = n, t, suite
        self.bounds = bounds
        self.gvals = gvals
        self.images = images

    @property
    def m(self) -> int:
        return len(self.images)

    @property
    def nblocks(self) -> int:
        return len(self.bounds) - 1

    def block(self, z: int) -> RawBlock:
        lo, hi = self.bounds[z], self.bounds[z + 1]
        return RawBlock(z, tuple(self.gvals[lo:hi]), tuple(img[z] for img in self.images))

    def blocks(self) -> list[RawBlock]:
        return [self.block(z) for z in range(self.nblocks)]

    def elements(self) -> list[int]:
        return sorted(self.suite.g.invert_many(self.gvals).tolist())

    def space_words(self) -> dict[str, int]:
        return {"elements": self.n, "len": self.nblocks, "images": self.m * self.nblocks,
                "total": self.n + (self.m + 1) * self.nblocks}

    def compress(self) -> "CompressedScanIndex":
        return CompressedScanIndex.from_raw(self)

    def __eq__(self, other):
        return (isinstance(other, ScanIndex) and self.n == other.n and self.t == other.t
                and self.bounds == other.bounds and self.gvals == other.gvals
                and self.images == other.images and self.suite.params() == other.suite.params())


class CompressedScanIndex:
    compressed = True

    def __init__(self, n: int, t: int, suite: HashSuite, stream: bytes, nbits: int):
        self.n, self.t, self.suite = n, t, suite
        self.stream, self.nbits = stream, nbits

    @property
    def m(self) -> int:
        return self.suite.config.m

    @property
    def nblocks(self) -> int:
        return (1 << self.t) if self.n else 0

    @classmethod
    def from_raw(cls, raw: ScanIndex) -> "CompressedScanIndex":
        stream, nbits = encode_stream(raw.bounds, raw.gvals, raw.images, raw.t,
                                      raw.suite.config.w)
        return cls(raw.n, raw.t, raw.suite, stream, nbits)

    def decompress(self) -> ScanIndex:
        reader = BitReader(self.stream, self.nbits)
        bounds, gvals = [0], []
        images: list[list[int]] = [[] for _ in range(self.m)]
        for z in range(self.nblocks):
            blk = _read_block(reader, z, self.t, self.m, self.suite.config.w)
            gvals.extend(blk.gvals)
            bounds.append(len(gvals))
            for j in range(self.m):
                images[j].append(blk.images[j])
        if reader.pos != self.nbits:
            raise ValueError("trailing bits after last block")
        return ScanIndex(self.n, self.t, self.suite, bounds, gvals, images)

    def elements(self) -> list[int]:
        return self.decompress().elements()

    def bit_budget(self) -> dict[str, int]:
        """Bits used by each component of the stream."""
        reader = BitReader(self.stream, self.nbits)
        sizes = images = elements = 0
        w, lowbits = self.suite.config.w, MACHINE_BITS - self.t
        for _ in range(self.nblocks):
            start = reader.pos
            ln = _read_unary(reader)
            sizes += reader.pos - start
            if ln:
                reader.skip(self.m * w)
                images += self.m * w
                reader.skip(ln * lowbits)
                elements += ln * lowbits
        return {"sizes": sizes, "images": images, "elements": elements, "total": self.nbits}


def _unary_fields(n: int) -> list[tuple[int, int]]:
    out = []
    while n > UNARY_CHUNK:
        out.append(((1 << UNARY_CHUNK) - 1, UNARY_CHUNK))
        n -= UNARY_CHUNK
    out.append((((1 << n) - 1) << 1, n + 1))
    return out


def encode_stream(bounds: Sequence[int], gvals: Sequence[int], images: Sequence[Sequence[int]],
                  t: int, w: int) -> tuple[bytes, int]:
    bounds = np.asarray(bounds, dtype=np.int64)
    lens = np.diff(bounds)
    nblocks = len(lens)
    m = len(images)
    if nblocks == 0:
        return b"", 0
    if lens.max() > UNARY_CHUNK - 1:
        return _encode_slow(bounds, gvals, images, t, w)
    nonempty = lens > 0
    counts = 1 + m * nonempty + lens
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    nfields = int(counts.sum())
    values = np.zeros(nfields, dtype=np.uint64)
    widths = np.zeros(nfields, dtype=np.int64)
    values[starts] = ((np.uint64(1) << lens.astype(np.uint64)) - np.uint64(1)) << np.uint64(1)
    widths[starts] = lens + 1
    img = np.asarray(images, dtype=np.uint64).reshape(m, nblocks)
    for j in range(m):
        pos = starts[nonempty] + 1 + j
        values[pos] = img[j, nonempty]
        widths[pos] = w
    n = int(bounds[-1])
    if n:
        blk = np.repeat(np.arange(nblocks), lens)
        rank = np.arange(n) - bounds[blk]
        pos = starts[blk] + 1 + m + rank
        gv = np.asarray(gvals, dtype=np.uint64)
        lowbits = MACHINE_BITS - t
        mask = np.uint64((1 << lowbits) - 1) if lowbits < 64 else np.uint64(0xFFFFFFFFFFFFFFFF)
        values[pos] = gv & mask
        widths[pos] = lowbits
    return pack_fields(values, widths)


def _encode_slow(bounds, gvals, images, t, w) -> tuple[bytes, int]:
    vals, wids = [], []
    lowbits = MACHINE_BITS - t
    mask = (1 << lowbits) - 1
    for z in range(len(bounds) - 1):
        lo, hi = int(bounds[z]), int(bounds[z + 1])
        for v, wd in _unary_fields(hi - lo):
            vals.append(v)
            wids.append(wd)
        if hi > lo:
            for img in images:
                vals.append(int(img[z]))
                wids.append(w)
            for gv in gvals[lo:hi]:
                vals.append(int(gv) & mask)
                wids.append(lowbits)
    return pack_fields(vals, wids)


def encode_block(block: RawBlock, t: int, w: int) -> tuple[bytes, int]:
    return encode_stream([0, len(block)], block.gvals, [[img] for img in block.images], t, w)


def _read_unary(reader: BitReader) -> int:
    n = 0
    while True:
        avail = min(64, reader.nbits - reader.pos)
        if avail <= 0:
            raise TruncatedStream("unterminated unary code")
        chunk = read_bits(reader.buf, reader.pos, avail)
        # leading ones of the chunk
        ones = avail - (chunk ^ ((1 << avail) - 1)).bit_length()
        if ones < avail:
            reader.pos += ones + 1
            return n + ones
        n += avail
        reader.pos += avail


def _read_block(reader: BitReader, z: int, t: int, m: int, w: int) -> RawBlock:
    ln = _read_unary(reader)
    if not ln:
        return RawBlock(z, (), (0,) * m)
    images = tuple(reader.read(w) for _ in range(m))
    lowbits = MACHINE_BITS - t
    high = z << lowbits if t else 0
    gvals = tuple(high | reader.read(lowbits) for _ in range(ln))
    return RawBlock(z, gvals, images)


def decode_block(stream: bytes, z: int, t: int, m: int, w: int,
                 nbits: int | None = None) -> RawBlock:
    return _read_block(BitReader(stream, nbits), z, t, m, w)


def build_scan(elements: Sequence[int], config: Config | None = None, compressed: bool = False,
               suite: HashSuite | None = None):
    if suite is None:
        suite = HashSuite.from_config(config or Config())
    arr = np.asarray(elements, dtype=np.uint64)
    if len(np.unique(arr)) != len(arr):
        raise ValueError("input set contains duplicates")
    n = len(arr)
    w = suite.config.w
    if n == 0:
        raw = ScanIndex(0, 0, suite, [0], [], [[] for _ in suite.hs])
        return raw.compress() if compressed else raw
    t = size_resolution(n, w)
    gv = np.sort(suite.g.many(arr))
    els = suite.g.invert_many(gv)
    bounds = prefix_bounds(gv, t)
    nblocks = len(bounds) - 1
    blk = np.repeat(np.arange(nblocks), np.diff(bounds))
    images = []
    for h in suite.hs:
        img = np.zeros(nblocks, dtype=np.uint64)
        np.bitwise_or.at(img, blk, np.left_shift(np.uint64(1), h.many(els).astype(np.uint64)))
        images.append(img.tolist())
    raw = ScanIndex(n, t, suite, bounds.tolist(), gv.tolist(), images)
    return raw.compress() if compressed else raw


# -- query ------------------------------------------------------------------

class _RawCursor:
    __slots__ = ("ix", "imgs", "bounds", "gvals")

    def __init__(self, ix: ScanIndex):
        self.ix = ix
        self.imgs = ix.images
        self.bounds = ix.bounds
        self.gvals = ix.gvals

    def header(self, z: int) -> tuple[int, ...]:
        return tuple(img[z] for img in self.imgs)

    def keys(self, z: int) -> list[int]:
        return self.gvals[self.bounds[z]:self.bounds[z + 1]]


class _StreamCursor:
    """Sequential block access; ``z`` must be requested in nondecreasing order."""

    __slots__ = ("reader", "t", "m", "w", "z", "ln", "imgs", "payload", "lowbits", "read_to")

    def __init__(self, ix: CompressedScanIndex):
        self.reader = BitReader(ix.stream, ix.nbits)
        self.t, self.m, self.w = ix.t, ix.m, ix.suite.config.w
        self.lowbits = MACHINE_BITS - ix.t
        self.z = -1
        self.ln = 0
        self.payload = 0
        self.imgs: tuple[int, ...] = ()

    def _advance(self, z: int) -> None:
        reader = self.reader
        while self.z < z:
            # skip whatever remains of the current block
            reader.pos = self.payload + self.ln * self.lowbits if self.z >= 0 else reader.pos
            self.ln = _read_unary(reader)
            if self.ln:
                self.imgs = tuple(reader.read(self.w) for _ in range(self.m))
            else:
                self.imgs = (0,) * self.m
            self.payload = reader.pos
            self.z += 1

    def header(self, z: int) -> tuple[int, ...]:
        self._advance(z)
        return self.imgs

    def keys(self, z: int) -> list[int]:
        self._advance(z)
        high = z << self.lowbits if self.t else 0
        buf, pos, lb = self.reader.buf, self.payload, self.lowbits
        return [high | read_bits(buf, pos + i * lb, lb) for i in range(self.ln)]


def _merge_keys(lists: list[list[int]], counters: Counters) -> list[int]:
    acc = lists[0]
    for other in lists[1:]:
        out = []
        i = j = 0
        na, nb = len(acc), len(other)
        cmp = 0
        while i < na and j < nb:
            x, y = acc[i], other[j]
            cmp += 1
            if x < y:
                i += 1
            elif y < x:
                j += 1
            else:
                out.append(x)
                i += 1
                j += 1
        counters.comparisons += cmp
        acc = out
        if not acc:
            break
    return acc


def _check_compatible(indexes) -> None:
    params = indexes[0].suite.params()
    for ix in indexes[1:]:
        other = ix.suite.params()
        if other != params:
            names = ("w", "m", "seed", "hash parameters")
            bad = next(nm for nm, a, b in zip(names, params, other) if a != b)
            raise ValueError(f"incompatible indexes: {bad} differs")


def intersect_scan(indexes: Sequence) -> IntersectionResult:
    if len(indexes) < 2:
        raise ValueError("scan intersection needs at least two indexes")
    _check_compatible(indexes)
    counters = Counters()
    ixs = sorted(indexes, key=lambda ix: ix.n)
    if not ixs[0].n:
        return IntersectionResult([], counters)
    k, m = len(ixs), ixs[0].m
    cursors = [_StreamCursor(ix) if ix.compressed else _RawCursor(ix) for ix in ixs]
    tk = ixs[-1].t
    shifts = [tk - ix.t for ix in ixs]
    found: list[int] = []
    for zk in range(1 << tk):
        counters.tuples_tested += 1
        zs = [zk >> s for s in shifts]
        heads = [c.header(z) for c, z in zip(cursors, zs)]
        passed = True
        for j in range(m):
            acc = heads[0][j]
            for i in range(1, k):
                acc &= heads[i][j]
            counters.image_ands += k - 1
            if not acc:
                passed = False
                break
        if not passed:
            counters.tuples_filtered += 1
            continue
        counters.tuples_merged += 1
        hit = _merge_keys([c.keys(z) for c, z in zip(cursors, zs)], counters)
        if hit:
            found.extend(hit)
        else:
            counters.false_positives += 1
    suite = ixs[0].suite
    elements = sorted(suite.g.invert_many(found).tolist()) if found else []
    return IntersectionResult(elements, counters)


def filter_rate(idx_a: ScanIndex, idx_b: ScanIndex) -> list[float]:
    """Cumulative skip rate using the first ``j`` hashes, ``j = 1..m``.

    Counted over tuples whose blocks are all nonempty and whose true
    intersection is empty.
    """
    if idx_a.compressed:
        idx_a = idx_a.decompress()
    if idx_b.compressed:
        idx_b = idx_b.decompress()
    a, b = sorted([idx_a, idx_b], key=lambda ix: ix.n)
    shift = b.t - a.t
    m = a.m
    skipped = [0] * m
    total = 0
    for zb in range(b.nblocks):
        za = zb >> shift
        ka, kb = a.gvals[a.bounds[za]:a.bounds[za + 1]], b.gvals[b.bounds[zb]:b.bounds[zb + 1]]
        if not ka or not kb or set(ka) & set(kb):
            continue
        total += 1
        first = next((j for j in range(m) if not a.images[j][za] & b.images[j][zb]), m)
        for j in range(first, m):
            skipped[j] += 1
    return [s / total if total else float("nan") for s in skipped]
