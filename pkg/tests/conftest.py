import random

import pytest

from fsi.core import Config, HashFn, HashSuite

L1 = [1001, 1002, 1004, 1009, 1016, 1027, 1043]
L2 = [1001, 1003, 1005, 1009, 1011, 1016, 1022, 1032, 1034, 1049]


def golden_suite() -> HashSuite:
    """w=16 suite whose h is the override (x - 1000) mod 16 on the example sets."""
    table = {x: (x - 1000) % 16 for x in set(L1) | set(L2)}
    base = HashSuite.from_config(Config(w=16, m=1, seed=0))
    return base.with_hashes([HashFn.from_table(table, 16)])


@pytest.fixture
def golden():
    return golden_suite()


@pytest.fixture
def suite64():
    return HashSuite.from_config(Config(w=64, m=2, seed=7))


def random_sets(rng: random.Random, sizes, r, universe=1 << 40):
    """k sorted sets sharing exactly r planted elements."""
    need = r + sum(n - r for n in sizes)
    pool = rng.sample(range(universe), need)
    core, pos, out = pool[:r], r, []
    for n in sizes:
        out.append(sorted(core + pool[pos:pos + n - r]))
        pos += n - r
    return out


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
