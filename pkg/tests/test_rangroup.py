import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fsi.baselines import merge_intersect
from fsi.core import Config, HashSuite
from fsi.multires import MultiResIndex
from fsi.rangroup import (EQUAL_COUNT, EQUAL_SIZE, count_resolution, intersect_ran2, intersect_rank,
                          plan_ran2, size_resolution)

from conftest import random_sets


@pytest.fixture(scope="module")
def suite():
    return HashSuite.from_config(Config(seed=21))


@given(st.integers(1, 10**7), st.integers(1, 10**7))
def test_resolutions_match_formulas(n1, n2):
    import math
    w = 64
    want = max(0, math.ceil(math.log2(math.sqrt(n1 * n2 / w)) - 1e-12)) if n1 * n2 > w else 0
    assert count_resolution(n1, n2, w) == want
    assert size_resolution(n1, w) == (max(0, math.ceil(math.log2(n1 / 8) - 1e-12)) if n1 > 8 else 0)


@pytest.mark.parametrize("n", [100, 1000, 6400, 10**5])
def test_equal_sizes_modes_coincide(n):
    assert plan_ran2(n, n, 64, EQUAL_COUNT) == plan_ran2(n, n, 64, EQUAL_SIZE)


def test_visited_pairs_equal_blocks(suite):
    rng = random.Random(1)
    a, b = random_sets(rng, (3000, 3000), 30)
    ia, ib = MultiResIndex(a, suite), MultiResIndex(b, suite)
    for mode in (EQUAL_COUNT, EQUAL_SIZE):
        res = intersect_ran2(ia, ib, mode)
        t1, t2 = plan_ran2(3000, 3000, 64, mode)
        assert res.counters.tuples_tested == 2 ** t2
        assert res.elements == merge_intersect([a, b]).elements


def test_oracle_pairs_both_modes(suite):
    rng = random.Random(2)
    for trial in range(1000):
        if trial % 50 == 0:
            n1, n2 = rng.randint(100, 10**5), rng.randint(100, 10**5)
        else:
            n1, n2 = rng.randint(100, 3000), rng.randint(100, 3000)
        r = int(min(n1, n2) * rng.choice([0, 0.01, 0.3, 1]))
        a, b = random_sets(rng, (n1, n2), r)
        ia, ib = MultiResIndex(a, suite), MultiResIndex(b, suite)
        want = merge_intersect([a, b]).elements
        for mode in (EQUAL_COUNT, EQUAL_SIZE):
            assert intersect_ran2(ia, ib, mode).elements == want


def test_identity_and_empty(suite):
    xs = list(range(5, 50000, 7))
    ix = MultiResIndex(xs, suite)
    for mode in (EQUAL_COUNT, EQUAL_SIZE):
        assert intersect_ran2(ix, ix, mode).elements == xs
    empty = MultiResIndex([], suite)
    assert intersect_ran2(empty, ix).elements == []
    assert intersect_rank([ix, empty, ix]).elements == []
    with pytest.raises(ValueError):
        intersect_ran2(ix, ix, "other")
    with pytest.raises(ValueError):
        intersect_rank([ix])


def test_rank_k2_matches_ran2(suite):
    rng = random.Random(3)
    for _ in range(50):
        a, b = random_sets(rng, (rng.randint(1, 2000), rng.randint(1, 2000)), 0)
        ia, ib = MultiResIndex(a, suite), MultiResIndex(b, suite)
        assert intersect_rank([ia, ib]).elements == intersect_ran2(ia, ib, EQUAL_SIZE).elements


def test_rank_k3_oracle_and_memo_bound(suite):
    rng = random.Random(4)
    for trial in range(1000):
        sizes = tuple(sorted(rng.randint(20, 800) for _ in range(3)))
        r = rng.randint(0, sizes[0] // 4)
        sets = random_sets(rng, sizes, r)
        ixs = [MultiResIndex(s, suite) for s in sets]
        rng.shuffle(ixs)
        res = intersect_rank(ixs)
        assert res.elements == merge_intersect(sets).elements
        ts = [ix.clamp(size_resolution(ix.n, 64)) for ix in ixs]
        assert res.counters.image_ands <= sum(2 ** t for t in ts) + 2 ** max(ts)


def test_rank_k4_planted(suite):
    rng = random.Random(5)
    sets = random_sets(rng, (5000, 6000, 7000, 9000), 40)
    res = intersect_rank([MultiResIndex(s, suite) for s in sets])
    assert res.elements == merge_intersect(sets).elements
    assert len(res.elements) == 40


def test_spurious_collisions_equal_count():
    # disjoint random sets; mean spurious pairs per visited tuple
    rng = np.random.default_rng(6)
    per_tuple = []
    for seed in range(20):
        suite = HashSuite.from_config(Config(seed=seed))
        pool = rng.choice(2 * 10**8, size=6000, replace=False).tolist()
        ia, ib = MultiResIndex(pool[:2000], suite), MultiResIndex(pool[2000:], suite)
        res = intersect_ran2(ia, ib, EQUAL_COUNT)
        assert res.elements == []
        per_tuple.append(res.counters.collisions / res.counters.tuples_tested)
    assert np.mean(per_tuple) <= 1.5
