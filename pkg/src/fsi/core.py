"""Word bitmaps, the filter hash family, the partitioning permutation and
shared configuration.

Bitmaps are plain Python ints: bit ``y`` set means position ``y`` of
``{0..w-1}`` is present. Elements are unsigned 64-bit integers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

MACHINE_BITS = 64
MACHINE_MASK = (1 << MACHINE_BITS) - 1
MERSENNE_61 = (1 << 61) - 1

SUPPORTED_WIDTHS = (16, 64)


@dataclass(frozen=True)
class Config:
    w: int = 64
    m: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.w not in SUPPORTED_WIDTHS:
            raise ValueError(f"w must be one of {SUPPORTED_WIDTHS}, got {self.w}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not 0 <= self.seed <= MACHINE_MASK:
            raise ValueError("seed must fit in 64 bits")

    @property
    def s(self) -> int:
        """Group side, the integer square root of ``w``."""
        return 4 if self.w == 16 else 8


# -- bitmaps ---------------------------------------------------------------

def bitmap_from(positions: Iterable[int]) -> int:
    bits = 0
    for y in positions:
        bits |= 1 << y
    return bits


def bitmap_and(a: int, b: int) -> int:
    return a & b


def lowest_bit(v: int) -> int:
    """Isolate the lowest set bit using the xor trick ``((v-1) ^ v) & v``."""
    return ((v - 1) ^ v) & v


def bitmap_enumerate(bits: int) -> list[int]:
    """Set positions of ``bits`` in ascending order, one step per set bit."""
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return out


def popcount(bits: int) -> int:
    return bits.bit_count()


# -- 2-universal filter hash -------------------------------------------------

def _mod61(x: np.ndarray) -> np.ndarray:
    x = (x & np.uint64(MERSENNE_61)) + (x >> np.uint64(61))
    return np.where(x >= np.uint64(MERSENNE_61), x - np.uint64(MERSENNE_61), x)


def _mulmod61(a: int, x: np.ndarray) -> np.ndarray:
    """``a * x mod (2**61 - 1)`` for ``a, x < 2**61`` without 128-bit ints."""
    u32 = np.uint64(0xFFFFFFFF)
    ah, al = np.uint64(a >> 32), np.uint64(a & 0xFFFFFFFF)
    xh, xl = x >> np.uint64(32), x & u32
    hi = (ah * xh) << np.uint64(3)  # 2**64 == 8 (mod p)
    mid = ah * xl + al * xh
    mid = (mid >> np.uint64(29)) + ((mid & np.uint64((1 << 29) - 1)) << np.uint64(32))
    lo = _mod61(al * xl)
    return _mod61(_mod61(hi + _mod61(mid)) + lo)


@dataclass(frozen=True)
class HashFn:
    """``h(x) = ((a*x + b) mod p) mod w`` with ``p = 2**61 - 1``.

    ``table`` overrides the family for fixed examples: every evaluated
    element must then appear as a key.
    """

    a: int
    b: int
    w: int
    p: int = MERSENNE_61
    table: Mapping[int, int] | None = field(default=None, compare=False)

    @classmethod
    def draw(cls, rng: np.random.Generator, w: int) -> "HashFn":
        a = int(rng.integers(1, MERSENNE_61))
        b = int(rng.integers(0, MERSENNE_61))
        return cls(a, b, w)

    @classmethod
    def from_table(cls, table: Mapping[int, int], w: int) -> "HashFn":
        if any(not 0 <= y < w for y in table.values()):
            raise ValueError("override table values must lie in [0, w)")
        return cls(0, 0, w, table=dict(table))

    def __call__(self, x: int) -> int:
        if self.table is not None:
            return self.table[x]
        return ((self.a * x + self.b) % self.p) % self.w

    def many(self, xs) -> np.ndarray:
        """Vectorised evaluation; agrees with ``__call__`` element-wise."""
        xs = np.asarray(xs, dtype=np.uint64)
        if self.table is not None:
            return np.array([self.table[int(x)] for x in xs], dtype=np.int64)
        ax = _mulmod61(self.a, _mod61(xs))
        v = _mod61(ax + np.uint64(self.b))
        return (v % np.uint64(self.w)).astype(np.int64)


# -- partitioning permutation -----------------------------------------------

_SHIFTS = (29, 32)


def _unxorshift(y: int, s: int) -> int:
    x = y
    for _ in range(MACHINE_BITS // s + 1):
        x = y ^ (x >> s)
    return x


@dataclass(frozen=True)
class PermFn:
    """Bijection on 64-bit ints: two rounds of odd multiply then xor-shift."""

    mults: tuple[int, int]

    @classmethod
    def from_seed(cls, seed: int) -> "PermFn":
        rng = np.random.default_rng([seed, 0x9E3779B9])
        mults = tuple(int(rng.integers(0, 1 << 63, dtype=np.uint64)) << 1 | 1 for _ in range(2))
        return cls(mults)

    @property
    def inverse_mults(self) -> tuple[int, int]:
        return tuple(pow(c, -1, 1 << MACHINE_BITS) for c in self.mults)

    def __call__(self, x: int) -> int:
        for c, s in zip(self.mults, _SHIFTS):
            x = (x * c) & MACHINE_MASK
            x ^= x >> s
        return x

    def invert(self, y: int) -> int:
        for c, s in zip(reversed(self.inverse_mults), reversed(_SHIFTS)):
            y = _unxorshift(y, s)
            y = (y * c) & MACHINE_MASK
        return y

    def many(self, xs) -> np.ndarray:
        x = np.array(xs, dtype=np.uint64)
        for c, s in zip(self.mults, _SHIFTS):
            x *= np.uint64(c)
            x ^= x >> np.uint64(s)
        return x

    def invert_many(self, ys) -> np.ndarray:
        y = np.array(ys, dtype=np.uint64)
        for c, s in zip(reversed(self.inverse_mults), reversed(_SHIFTS)):
            x = y.copy()
            for _ in range(MACHINE_BITS // s + 1):
                x = y ^ (x >> np.uint64(s))
            y = x * np.uint64(c)
        return y


def perm_apply(g: PermFn, x: int) -> int:
    return g(x)


def perm_invert(g: PermFn, y: int) -> int:
    return g.invert(y)


def prefix(gval: int, t: int) -> int:
    """The ``t`` most significant bits of a 64-bit value (0 when ``t == 0``)."""
    if not 0 <= t <= MACHINE_BITS:
        raise ValueError(f"prefix length {t} outside [0, {MACHINE_BITS}]")
    return gval >> (MACHINE_BITS - t) if t else 0


def hash_eval(h: HashFn, x: int) -> int:
    return h(x)


@dataclass(frozen=True)
class HashSuite:
    """The permutation ``g`` plus ``m`` filter hashes, all derived from one seed."""

    config: Config
    g: PermFn
    hs: tuple[HashFn, ...]

    @classmethod
    def from_config(cls, config: Config) -> "HashSuite":
        rng = np.random.default_rng([config.seed, 0x51ED])
        hs = tuple(HashFn.draw(rng, config.w) for _ in range(config.m))
        return cls(config, PermFn.from_seed(config.seed), hs)

    @property
    def h(self) -> HashFn:
        """The hash used by the inverted-mapping algorithms."""
        return self.hs[0]

    def with_hashes(self, hs: Sequence[HashFn]) -> "HashSuite":
        cfg = Config(self.config.w, len(hs), self.config.seed)
        return HashSuite(cfg, self.g, tuple(hs))

    def params(self) -> tuple:
        return (self.config.w, self.config.m, self.config.seed,
                tuple((h.a, h.b, h.p) for h in self.hs))
