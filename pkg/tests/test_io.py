import random

import pytest

from fsi import io
from fsi.core import Config, HashSuite
from fsi.intgroup import FixedWidthIndex
from fsi.multires import MultiResIndex
from fsi.ranscan import build_scan

from conftest import golden_suite


@pytest.fixture(scope="module")
def suite():
    return HashSuite.from_config(Config(m=3, seed=51))


def test_set_round_trip(tmp_path):
    xs = [0, 5, 2**63, 2**64 - 1]
    p = tmp_path / "a.set"
    io.write_set(p, xs)
    assert io.read_set(p) == xs
    assert io.sniff(p) == "set"
    assert io.encode_set(io.read_set(p)) == p.read_bytes()
    assert io.decode_set(io.encode_set([])) == []


def test_set_validation():
    good = io.encode_set([1, 2, 3])
    with pytest.raises(ValueError):
        io.encode_set([2, 1])
    for bad in (b"XXXX" + good[4:], good[:4] + b"\x09\x00" + good[6:], good[:-3], good[:10]):
        with pytest.raises(io.FormatError):
            io.decode_set(bad)
    unsorted = good[:io._SET_HEADER.size] + (3).to_bytes(8, "little") + (1).to_bytes(8, "little") * 2
    with pytest.raises(io.FormatError):
        io.decode_set(unsorted)


@pytest.mark.parametrize("kind", ["intgroup", "multires", "raw", "compressed"])
@pytest.mark.parametrize("n", [0, 1, 9, 2500])
def test_index_round_trip(suite, kind, n):
    rng = random.Random(n)
    xs = sorted(rng.sample(range(1 << 60), n))
    if kind == "intgroup":
        ix = FixedWidthIndex(xs, suite)
    elif kind == "multires":
        ix = MultiResIndex(xs, suite)
    else:
        ix = build_scan(xs, suite=suite, compressed=kind == "compressed")
    data = io.encode_index(ix)
    back = io.decode_index(data)
    assert io.index_tag(back) == io.index_tag(ix)
    assert io.encode_index(back) == data
    assert back.suite.params() == suite.params()
    if kind == "raw":
        assert back == ix
    if kind == "compressed":
        assert back.stream == ix.stream and back.nbits == ix.nbits


def test_index_errors(suite):
    data = io.encode_index(build_scan([1, 2, 3], suite=suite))
    with pytest.raises(io.FormatError):
        io.decode_index(b"FSI1" + data[4:])
    with pytest.raises(io.FormatError):
        io.decode_index(data[:5] + b"\x09" + data[6:])
    with pytest.raises(io.FormatError):
        io.decode_index(data[:-4])
    with pytest.raises(io.FormatError):
        io.decode_index(data[:12])
    with pytest.raises(ValueError):
        io.encode_index(MultiResIndex([1001], golden_suite()))


def test_check_compatible_names_field(suite):
    a = build_scan([1, 2], suite=suite)
    for cfg, field in ((Config(m=2, seed=51), "m"), (Config(m=3, seed=52), "seed"),
                       (Config(w=16, m=3, seed=51), "w")):
        b = build_scan([1, 2], suite=HashSuite.from_config(cfg))
        with pytest.raises(ValueError, match=f"{field} differs"):
            io.check_compatible([a, b])
    io.check_compatible([a, build_scan([5], suite=suite)])


def test_sniff_rejects_garbage(tmp_path):
    p = tmp_path / "junk"
    p.write_bytes(b"hello")
    with pytest.raises(io.FormatError):
        io.sniff(p)
