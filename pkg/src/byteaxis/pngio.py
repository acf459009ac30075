"""Deterministic PNG writing.

`zlib.compress` output is allowed to differ between zlib builds (zlib-ng
notably differs), which would break the promise that identical plots have
identical bytes on every machine.  IDAT is therefore produced by a small
deflate encoder of our own: one fixed-Huffman block whose only matches are
distance-1 runs.  Together with the Up row filter this compresses the flat
regions that dominate byte-axis plots while keeping the byte stream a pure
function of the pixels.

Output is 8-bit/channel RGB, no alpha, no interlace, one IDAT chunk.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np


def _revbits(value: int, width: int) -> int:
    out = 0
    for _ in range(width):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


def _fixed_litlen_codes() -> list[tuple[int, int]]:
    # RFC 1951 3.2.6, codes stored bit-reversed for an LSB-first writer.
    table = []
    for sym in range(288):
        if sym < 144:
            code, nbits = 0x30 + sym, 8
        elif sym < 256:
            code, nbits = 0x190 + (sym - 144), 9
        elif sym < 280:
            code, nbits = sym - 256, 7
        else:
            code, nbits = 0xC0 + (sym - 280), 8
        table.append((_revbits(code, nbits), nbits))
    return table


def _length_symbols() -> list[tuple[int, int, int]]:
    # match length 3..258 -> (symbol, extra bit count, length base)
    bases = [
        (257, 0, 3), (258, 0, 4), (259, 0, 5), (260, 0, 6),
        (261, 0, 7), (262, 0, 8), (263, 0, 9), (264, 0, 10),
        (265, 1, 11), (266, 1, 13), (267, 1, 15), (268, 1, 17),
        (269, 2, 19), (270, 2, 23), (271, 2, 27), (272, 2, 31),
        (273, 3, 35), (274, 3, 43), (275, 3, 51), (276, 3, 59),
        (277, 4, 67), (278, 4, 83), (279, 4, 99), (280, 4, 115),
        (281, 5, 131), (282, 5, 163), (283, 5, 195), (284, 5, 227),
        (285, 0, 258),
    ]
    table: list[tuple[int, int, int]] = [(0, 0, 0)] * 259
    for sym, extra, base in bases:
        span = 1 if extra == 0 else 1 << extra
        for length in range(base, min(base + span, 259)):
            table[length] = (sym, extra, base)
    table[258] = (285, 0, 258)
    return table


_LITLEN = _fixed_litlen_codes()
_LENGTH = _length_symbols()


class _BitWriter:
    """LSB-first bit packer (deflate bit order)."""

    __slots__ = ("out", "acc", "nbits")

    def __init__(self):
        self.out = bytearray()
        self.acc = 0
        self.nbits = 0

    def write(self, value: int, count: int) -> None:
        self.acc |= value << self.nbits
        self.nbits += count
        while self.nbits >= 8:
            self.out.append(self.acc & 0xFF)
            self.acc >>= 8
            self.nbits -= 8

    def finish(self) -> bytes:
        if self.nbits:
            self.out.append(self.acc & 0xFF)
        return bytes(self.out)


def deflate_fixed(data: bytes) -> bytes:
    """Deflate data as one final fixed-Huffman block, runs as dist-1 matches."""
    w = _BitWriter()
    write = w.write
    litlen = _LITLEN
    lentab = _LENGTH
    w.write(1, 1)  # BFINAL
    w.write(1, 2)  # BTYPE 01, fixed Huffman
    arr = np.frombuffer(data, dtype=np.uint8)
    if arr.size:
        change = np.flatnonzero(arr[1:] != arr[:-1]) + 1
        starts = np.concatenate(([0], change)).tolist()
        ends = np.concatenate((change, [arr.size])).tolist()
        for start, end in zip(starts, ends):
            byte = data[start]
            code, nbits = litlen[byte]
            write(code, nbits)
            rem = end - start - 1
            while rem:
                if rem < 3:
                    for _ in range(rem):
                        write(code, nbits)
                    break
                take = rem if rem <= 258 else 258
                if rem - take in (1, 2):
                    take = rem - 3
                sym, extra, base = lentab[take]
                lcode, lbits = litlen[sym]
                write(lcode, lbits)
                if extra:
                    write(take - base, extra)
                write(0, 5)  # distance code 0 -> distance 1
                rem -= take
    code, nbits = litlen[256]
    write(code, nbits)  # end of block
    return w.finish()


def _zlib_wrap(data: bytes) -> bytes:
    # 0x78 0x01: deflate, 32K window, check bits valid (0x7801 % 31 == 0)
    return b"\x78\x01" + deflate_fixed(data) + struct.pack(">I", zlib.adler32(data))


def _chunk(tag: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + tag
        + payload
        + struct.pack(">I", zlib.crc32(tag + payload))
    )


def write_png(rgb: np.ndarray) -> bytes:
    """Encode an (H, W, 3) uint8 array as PNG bytes.

    Every scanline uses the Up filter, so vertically constant regions (and
    the repeated rows produced by integer cell scaling) become zero runs.
    """
    if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.dtype != np.uint8:
        raise ValueError(f"need (H, W, 3) uint8 array, got {rgb.shape} {rgb.dtype}")
    height, width = rgb.shape[:2]
    rows = np.ascontiguousarray(rgb).reshape(height, width * 3)
    filtered = np.empty((height, width * 3 + 1), dtype=np.uint8)
    filtered[:, 0] = 2  # Up
    filtered[0, 1:] = rows[0]
    filtered[1:, 1:] = rows[1:] - rows[:-1]
    raw = filtered.tobytes()
    header = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    return b"".join(
        (
            b"\x89PNG\r\n\x1a\n",
            _chunk(b"IHDR", header),
            _chunk(b"IDAT", _zlib_wrap(raw)),
            _chunk(b"IEND", b""),
        )
    )
