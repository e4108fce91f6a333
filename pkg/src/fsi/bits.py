"""MSB-first bit streams: vectorised packing and a sequential reader."""
from __future__ import annotations

import numpy as np


class TruncatedStream(ValueError):
    pass


def pack_fields(values, widths) -> tuple[bytes, int]:
    """Concatenate ``values[i]`` written in ``widths[i]`` bits, MSB first.

    Returns the byte string (zero padded to a byte boundary) and the
    number of meaningful bits.
    """
    values = np.asarray(values, dtype=np.uint64)
    widths = np.asarray(widths, dtype=np.int64)
    if values.shape != widths.shape:
        raise ValueError("values and widths must have the same length")
    total = int(widths.sum())
    if total == 0:
        return b"", 0
    chunks = []
    step = 1 << 16
    for lo in range(0, len(values), step):
        v = values[lo:lo + step]
        wd = widths[lo:lo + step]
        maxw = int(wd.max()) if len(wd) else 0
        if maxw == 0:
            continue
        # column j holds bit (width-1-j) of the value; columns >= width are dropped
        cols = np.arange(maxw, dtype=np.int64)
        shift = (wd[:, None] - 1 - cols[None, :]).clip(min=0).astype(np.uint64)
        bitmat = ((v[:, None] >> shift) & np.uint64(1)).astype(np.uint8)
        keep = cols[None, :] < wd[:, None]
        chunks.append(bitmat[keep])
    bits = np.concatenate(chunks)
    return np.packbits(bits).tobytes(), total


def read_bits(buf: bytes, pos: int, width: int) -> int:
    """Read ``width`` bits starting at bit offset ``pos``."""
    if width == 0:
        return 0
    start = pos >> 3
    end = (pos + width + 7) >> 3
    if end > len(buf):
        raise TruncatedStream(f"need bits up to {pos + width}, stream has {len(buf) * 8}")
    chunk = int.from_bytes(buf[start:end], "big")
    return (chunk >> ((end - start) * 8 - (pos & 7) - width)) & ((1 << width) - 1)


class BitReader:
    def __init__(self, buf: bytes, nbits: int | None = None):
        self.buf = buf
        self.nbits = len(buf) * 8 if nbits is None else nbits
        self.pos = 0

    def read(self, width: int) -> int:
        if self.pos + width > self.nbits:
            raise TruncatedStream(f"read of {width} bits at {self.pos} past end {self.nbits}")
        v = read_bits(self.buf, self.pos, width)
        self.pos += width
        return v

    def read_unary(self) -> int:
        """Count one-bits up to the terminating zero."""
        n = 0
        while True:
            if self.pos >= self.nbits:
                raise TruncatedStream("unterminated unary code")
            if read_bits(self.buf, self.pos, 1):
                n += 1
                self.pos += 1
            else:
                self.pos += 1
                return n

    def skip(self, width: int) -> None:
        if self.pos + width > self.nbits:
            raise TruncatedStream(f"skip of {width} bits at {self.pos} past end {self.nbits}")
        self.pos += width
