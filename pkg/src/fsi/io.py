"""Binary set and index files (little-endian).

Set file::

    "FSI1" | u16 version | u8 element width (64) | u8 reserved | u64 count
    | count x u64 elements, strictly increasing

Index file::

    "FSIX" | u16 version | u8 algorithm tag | u8 reserved
    | u16 w | u16 m | u64 seed | u64 p | m x (u64 a, u64 b)
    | payload

Payloads (all start with u64 n):

* intgroup, multires: n sorted elements; the structure is rebuilt on load.
* ranscan-raw: u8 t, then per block z = 0..2**t-1:
  u64 len | m x u64 image | len x u64 g-value.
* ranscan-compressed: u8 t | u64 bit length | the compressed block stream.
"""
from __future__ import annotations

import struct
from pathlib import Path
from typing import Sequence

import numpy as np

from fsi.core import Config, HashFn, HashSuite, PermFn
from fsi.intgroup import FixedWidthIndex
from fsi.multires import MultiResIndex
from fsi.ranscan import CompressedScanIndex, ScanIndex

SET_MAGIC = b"FSI1"
INDEX_MAGIC = b"FSIX"
VERSION = 1

_SET_HEADER = struct.Struct("<4sHBBQ")
_INDEX_HEADER = struct.Struct("<4sHBB")
_CONFIG = struct.Struct("<HHQQ")

ALGO_TAGS = {"intgroup": 1, "multires": 2, "ranscan-raw": 3, "ranscan-compressed": 4}
TAG_ALGOS = {v: k for k, v in ALGO_TAGS.items()}


class FormatError(ValueError):
    pass


# -- set files -----------------------------------------------------------------

def encode_set(elements: Sequence[int]) -> bytes:
    arr = np.asarray(elements, dtype=np.uint64)
    if len(arr) > 1 and not np.all(arr[1:] > arr[:-1]):
        raise ValueError("set must be sorted and duplicate-free")
    return _SET_HEADER.pack(SET_MAGIC, VERSION, 64, 0, len(arr)) + arr.astype("<u8").tobytes()


def decode_set(data: bytes) -> list[int]:
    if len(data) < _SET_HEADER.size:
        raise FormatError("set file too short for header")
    magic, version, width, _, count = _SET_HEADER.unpack_from(data)
    if magic != SET_MAGIC:
        raise FormatError(f"bad set magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported set file version {version}")
    if width != 64:
        raise FormatError(f"unsupported element width {width}")
    body = data[_SET_HEADER.size:]
    if len(body) != 8 * count:
        raise FormatError(f"header says {count} elements, body holds {len(body) / 8:g}")
    arr = np.frombuffer(body, dtype="<u8")
    if len(arr) > 1 and not np.all(arr[1:] > arr[:-1]):
        raise FormatError("set elements are not strictly increasing")
    return arr.astype(np.uint64).tolist()


def write_set(path, elements: Sequence[int]) -> None:
    Path(path).write_bytes(encode_set(elements))


def read_set(path) -> list[int]:
    return decode_set(Path(path).read_bytes())


# -- index files -----------------------------------------------------------------

def _encode_suite(suite: HashSuite) -> bytes:
    if any(h.table is not None for h in suite.hs):
        raise ValueError("override-table hashes cannot be serialized")
    cfg = suite.config
    out = _CONFIG.pack(cfg.w, cfg.m, cfg.seed, suite.hs[0].p)
    return out + b"".join(struct.pack("<QQ", h.a, h.b) for h in suite.hs)


def _decode_suite(data: bytes, pos: int) -> tuple[HashSuite, int]:
    w, m, seed, p = _CONFIG.unpack_from(data, pos)
    pos += _CONFIG.size
    try:
        cfg = Config(w, m, seed)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    hs = []
    for _ in range(m):
        a, b = struct.unpack_from("<QQ", data, pos)
        pos += 16
        hs.append(HashFn(a, b, w, p))
    return HashSuite(cfg, PermFn.from_seed(seed), tuple(hs)), pos


def index_tag(index) -> str:
    if isinstance(index, FixedWidthIndex):
        return "intgroup"
    if isinstance(index, MultiResIndex):
        return "multires"
    if isinstance(index, CompressedScanIndex):
        return "ranscan-compressed"
    if isinstance(index, ScanIndex):
        return "ranscan-raw"
    raise TypeError(f"cannot serialize {type(index).__name__}")


def encode_index(index) -> bytes:
    tag = index_tag(index)
    head = _INDEX_HEADER.pack(INDEX_MAGIC, VERSION, ALGO_TAGS[tag], 0) + _encode_suite(index.suite)
    if tag == "intgroup":
        body = struct.pack("<Q", index.n) + np.asarray(index.elements, dtype="<u8").tobytes()
    elif tag == "multires":
        els = np.sort(np.asarray(index.elements, dtype=np.uint64))
        body = struct.pack("<Q", index.n) + els.astype("<u8").tobytes()
    elif tag == "ranscan-raw":
        words = []
        for z in range(index.nblocks):
            lo, hi = index.bounds[z], index.bounds[z + 1]
            words.append(hi - lo)
            words.extend(img[z] for img in index.images)
            words.extend(index.gvals[lo:hi])
        body = struct.pack("<QB", index.n, index.t) + np.asarray(words, dtype="<u8").tobytes()
    else:
        body = struct.pack("<QBQ", index.n, index.t, index.nbits) + index.stream
    return head + body


def decode_index(data: bytes):
    if len(data) < _INDEX_HEADER.size + _CONFIG.size:
        raise FormatError("index file too short for header")
    magic, version, tag, _ = _INDEX_HEADER.unpack_from(data)
    if magic != INDEX_MAGIC:
        raise FormatError(f"bad index magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported index version {version}")
    if tag not in TAG_ALGOS:
        raise FormatError(f"unknown algorithm tag {tag}")
    algo = TAG_ALGOS[tag]
    try:
        suite, pos = _decode_suite(data, _INDEX_HEADER.size)
        return _decode_payload(algo, suite, data, pos)
    except struct.error as exc:
        raise FormatError(f"truncated index payload: {exc}") from exc


def _decode_payload(algo: str, suite: HashSuite, data: bytes, pos: int):
    if algo in ("intgroup", "multires"):
        (n,) = struct.unpack_from("<Q", data, pos)
        body = data[pos + 8:]
        if len(body) % 8:
            raise FormatError("element payload is not a whole number of words")
        if len(body) != 8 * n:
            raise FormatError("element payload length mismatch")
        els = np.frombuffer(body, dtype="<u8").astype(np.uint64)
        if len(els) > 1 and not np.all(els[1:] > els[:-1]):
            raise FormatError("index elements are not strictly increasing")
        cls = FixedWidthIndex if algo == "intgroup" else MultiResIndex
        return cls(els, suite)
    if algo == "ranscan-raw":
        n, t = struct.unpack_from("<QB", data, pos)
        if (len(data) - pos - 9) % 8:
            raise FormatError("ranscan payload is not a whole number of words")
        words = np.frombuffer(data[pos + 9:], dtype="<u8").astype(np.uint64).tolist()
        m = suite.config.m
        bounds, gvals = [0], []
        images: list[list[int]] = [[] for _ in range(m)]
        i = 0
        for _ in range(1 << t if n else 0):
            if i + 1 + m > len(words):
                raise FormatError("truncated ranscan block")
            ln = words[i]
            for j in range(m):
                images[j].append(words[i + 1 + j])
            i += 1 + m
            gvals.extend(words[i:i + ln])
            i += ln
            bounds.append(len(gvals))
        if i != len(words) or len(gvals) != n:
            raise FormatError("ranscan payload length mismatch")
        return ScanIndex(n, t, suite, bounds, gvals, images)
    n, t, nbits = struct.unpack_from("<QBQ", data, pos)
    stream = data[pos + 17:]
    if len(stream) != (nbits + 7) // 8:
        raise FormatError("compressed stream length mismatch")
    if t > 64:
        raise FormatError(f"resolution {t} exceeds 64")
    return CompressedScanIndex(n, t, suite, stream, nbits)


def write_index(path, index) -> None:
    Path(path).write_bytes(encode_index(index))


def read_index(path):
    return decode_index(Path(path).read_bytes())


def sniff(path) -> str:
    """``"set"`` or ``"index"`` from the file magic."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == SET_MAGIC:
        return "set"
    if magic == INDEX_MAGIC:
        return "index"
    raise FormatError(f"{path}: unrecognised magic {magic!r}")


def check_compatible(indexes) -> None:
    """Raise naming the first config field on which the indexes disagree."""
    base = indexes[0].suite
    for ix in indexes[1:]:
        other = ix.suite
        for name, a, b in (("w", base.config.w, other.config.w),
                           ("m", base.config.m, other.config.m),
                           ("seed", base.config.seed, other.config.seed),
                           ("hash parameters", [(h.a, h.b, h.p) for h in base.hs],
                            [(h.a, h.b, h.p) for h in other.hs])):
            if a != b:
                raise ValueError(f"incompatible indexes: {name} differs")
