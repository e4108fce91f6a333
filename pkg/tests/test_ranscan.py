import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fsi.baselines import merge_intersect
from fsi.bits import TruncatedStream
from fsi.core import MACHINE_BITS, Config, HashSuite
from fsi.ranscan import (CompressedScanIndex, RawBlock, ScanIndex, build_scan, decode_block,
                         encode_block, filter_rate, intersect_scan)
from fsi.workload import WorkloadSpec, delta, generate

from conftest import random_sets


@pytest.fixture(scope="module")
def suite():
    return HashSuite.from_config(Config(m=2, seed=31))


def test_raw_space_n6400(suite):
    rng = random.Random(0)
    idx = build_scan(rng.sample(range(1 << 50), 6400), suite=suite)
    assert idx.t == 10 and idx.nblocks == 1024
    words = idx.space_words()
    assert words["elements"] == 6400
    assert words["total"] == 6400 + 3 * 1024
    assert len(idx.gvals) == 6400 and sum(len(b) for b in idx.blocks()) == 6400


def test_block_invariants(suite):
    rng = random.Random(1)
    xs = rng.sample(range(1 << 50), 3000)
    idx = build_scan(xs, suite=suite)
    assert idx.elements() == sorted(xs)
    for blk in idx.blocks():
        assert list(blk.gvals) == sorted(blk.gvals)
        assert all(gv >> (MACHINE_BITS - idx.t) == blk.z for gv in blk.gvals)
        els = suite.g.invert_many(list(blk.gvals)).tolist() if len(blk) else []
        for j, h in enumerate(suite.hs):
            assert blk.images[j] == sum({1 << h(x) for x in els})


def test_singleton_and_empty(suite):
    one = build_scan([77], suite=suite)
    assert one.t == 0 and one.nblocks == 1 and len(one.block(0)) == 1
    empty = build_scan([], suite=suite)
    assert empty.n == 0 and intersect_scan([empty, one]).elements == []
    cempty = build_scan([], suite=suite, compressed=True)
    assert cempty.decompress() == empty


def test_compressed_bit_budget(suite):
    rng = random.Random(2)
    for n in (1, 7, 100, 6400, 20000):
        xs = rng.sample(range(1 << 50), n)
        c = build_scan(xs, suite=suite, compressed=True)
        budget = c.bit_budget()
        assert budget["elements"] == (MACHINE_BITS - c.t) * n
        nonempty = sum(1 for b in c.decompress().blocks() if len(b))
        assert budget["images"] == 2 * 64 * nonempty
        assert budget["sizes"] == n + c.nblocks
        assert budget["total"] == budget["sizes"] + budget["images"] + budget["elements"]
        assert c.decompress() == build_scan(xs, suite=suite)


def _random_block(rng, t, m, w):
    z = rng.randrange(1 << t)
    ln = rng.choice([0, 0, 1, 2, 5, 8, 20, 70, 130])
    low = set()
    while len(low) < ln:
        low.add(rng.getrandbits(MACHINE_BITS - t))
    low = sorted(low)
    gvals = tuple((z << (MACHINE_BITS - t) if t else 0) | v for v in low)
    images = tuple(rng.getrandbits(w) | 1 for _ in range(m)) if ln else (0,) * m
    return RawBlock(z, gvals, images)


def test_block_round_trip_all_t():
    rng = random.Random(3)
    for i in range(1000):
        t, m, w = i % 21, rng.randint(1, 4), rng.choice([16, 64])
        blk = _random_block(rng, t, m, w)
        stream, nbits = encode_block(blk, t, w)
        assert decode_block(stream, blk.z, t, m, w, nbits) == blk


def test_unary_convention():
    # len 2: two one-bits and a zero terminator, then 1 image of 16 bits
    blk = RawBlock(0, (5, 9), (0b11,))
    stream, nbits = encode_block(blk, 0, 16)
    assert nbits == 3 + 16 + 2 * 64
    assert stream[0] >> 5 == 0b110
    empty_stream, empty_bits = encode_block(RawBlock(0, (), (0,)), 0, 16)
    assert empty_bits == 1 and empty_stream == b"\x00"


def test_truncated_stream_raises():
    blk = RawBlock(0, (5, 9), (3,))
    stream, nbits = encode_block(blk, 0, 16)
    with pytest.raises(TruncatedStream):
        decode_block(stream, 0, 0, 1, 16, nbits - 10)
    with pytest.raises(TruncatedStream):
        decode_block(b"\xff", 0, 0, 1, 16, 8)


def test_oracle_raw_and_compressed(suite):
    rng = random.Random(4)
    for trial in range(300):
        k = rng.choice([2, 2, 3, 4])
        sizes = tuple(rng.randint(1, 3000) for _ in range(k))
        r = int(min(sizes) * rng.choice([0, 0.01, 0.5, 1]))
        sets = random_sets(rng, sizes, r)
        want = merge_intersect(sets).elements
        mix = [build_scan(s, suite=suite, compressed=rng.random() < 0.5) for s in sets]
        assert intersect_scan(mix).elements == want


def test_no_false_negatives(suite):
    rng = random.Random(5)
    a, b = random_sets(rng, (4000, 4000), 2000)
    ia, ib = build_scan(a, suite=suite), build_scan(b, suite=suite)
    res = intersect_scan([ia, ib])
    true_pairs = sum(1 for z in range(ia.nblocks) if set(ia.block(z).gvals) & set(ib.block(z).gvals))
    assert res.counters.tuples_merged - res.counters.false_positives == true_pairs
    assert res.elements == merge_intersect([a, b]).elements


def test_identical_indexes(suite):
    rng = random.Random(6)
    xs = sorted(rng.sample(range(1 << 50), 5000))
    ix = build_scan(xs, suite=suite)
    res = intersect_scan([ix, ix])
    assert res.elements == xs
    empties = sum(1 for b in ix.blocks() if not len(b))
    assert res.counters.tuples_filtered == empties


def test_k4_empty_intersection(suite):
    sets = generate(WorkloadSpec((10**4,) * 4, 0, seed=7))
    res = intersect_scan([build_scan(s, suite=suite) for s in sets])
    assert res.elements == []
    assert res.counters.tuples_merged < 0.1 * res.counters.tuples_tested


def test_filtered_fraction_n1e4_m2():
    sets = generate(WorkloadSpec((10**4, 10**4), 100, seed=8))
    suite = HashSuite.from_config(Config(m=2, seed=8))
    ia, ib = (build_scan(s, suite=suite) for s in sets)
    res = intersect_scan([ia, ib])
    assert res.elements == merge_intersect(sets).elements
    assert res.counters.tuples_filtered / res.counters.tuples_tested >= 0.9


def test_filter_rate_bounds():
    sets = generate(WorkloadSpec((20000, 20000), 0, seed=9))
    suite = HashSuite.from_config(Config(m=4, seed=9))
    ia, ib = (build_scan(s, suite=suite) for s in sets)
    rates = filter_rate(ia, ib)
    total = sum(1 for z in range(ia.nblocks) if len(ia.block(z)) and len(ib.block(z)))
    sigma = (0.3436 * (1 - 0.3436) / total) ** 0.5
    assert rates[0] >= 0.3436 - 3 * sigma
    assert rates == sorted(rates)


def test_group_size_concentration(suite):
    rng = np.random.default_rng(10)
    idx = build_scan(rng.choice(2 * 10**8, size=1 << 16, replace=False).tolist(), suite=suite)
    lens = np.diff(idx.bounds)
    frac = float(np.mean(lens <= delta(64) * 8))
    assert frac >= 1 - 1 / 32


def test_incompatible_indexes():
    a = build_scan([1, 2, 3], config=Config(m=2, seed=1))
    b = build_scan([1, 2, 3], config=Config(m=3, seed=1))
    c = build_scan([1, 2, 3], config=Config(m=2, seed=2))
    with pytest.raises(ValueError, match="m differs"):
        intersect_scan([a, b])
    with pytest.raises(ValueError, match="seed differs"):
        intersect_scan([a, c])
