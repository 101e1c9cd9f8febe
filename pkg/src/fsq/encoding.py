"""Byte framing and XOF helpers shared by hash inputs and file formats.

Every variable-length field is written as an 8-byte big-endian length
followed by the bytes. Round indices are fixed 4-byte big-endian words.
"""

from __future__ import annotations

import hashlib
import struct
from typing import Sequence

_LEN = struct.Struct(">Q")
_IDX = struct.Struct(">I")


class ParseError(ValueError):
    """Raised when a framed byte string is malformed."""


def frame_field(data: bytes) -> bytes:
    return _LEN.pack(len(data)) + bytes(data)


def frame(*fields: bytes) -> bytes:
    return b"".join(frame_field(f) for f in fields)


def round_index(i: int) -> bytes:
    return _IDX.pack(i)


def parse_frames(data: bytes, offset: int = 0) -> list[bytes]:
    """Split a concatenation of framed fields; the input must be consumed exactly."""
    out = []
    view = memoryview(data)
    pos = offset
    while pos < len(data):
        if pos + 8 > len(data):
            raise ParseError("truncated length prefix")
        (n,) = _LEN.unpack_from(view, pos)
        pos += 8
        if pos + n > len(data):
            raise ParseError("truncated field")
        out.append(bytes(view[pos : pos + n]))
        pos += n
    return out


def int_width(bound: int) -> int:
    """Bytes needed to hold every integer in [0, bound)."""
    return max(1, ((bound - 1).bit_length() + 7) // 8)


def encode_int(value: int, width: int) -> bytes:
    return value.to_bytes(width, "big")


def decode_int(data: bytes, width: int, bound: int) -> int:
    if len(data) != width:
        raise ValueError(f"expected {width} bytes, got {len(data)}")
    value = int.from_bytes(data, "big")
    if value >= bound:
        raise ValueError("value out of range")
    return value


def as_seed(seed: int | str | bytes) -> bytes:
    if isinstance(seed, bytes):
        return seed
    if isinstance(seed, str):
        return seed.encode()
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return seed.to_bytes(max(1, (seed.bit_length() + 7) // 8), "big")


class XofStream:
    """Deterministic stream of uniform integers drawn from SHAKE256(data)."""

    def __init__(self, data: bytes, chunk: int = 256):
        self._data = data
        self._len = chunk
        self._buf = hashlib.shake_256(data).digest(chunk)
        self._pos = 0

    def read(self, n: int) -> bytes:
        while self._pos + n > len(self._buf):
            # SHAKE output is prefix-consistent, so regrowing keeps earlier bytes.
            self._len *= 2
            self._buf = hashlib.shake_256(self._data).digest(self._len)
        out = self._buf[self._pos : self._pos + n]
        self._pos += n
        return out

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection sampling on fixed-width blocks."""
        if bound < 1:
            raise ValueError("bound must be positive")
        if bound == 1:
            return 0
        width = int_width(bound)
        mask = (1 << (bound - 1).bit_length()) - 1
        while True:
            v = int.from_bytes(self.read(width), "big") & mask
            if v < bound:
                return v

    def vector(self, bound: int, count: int) -> list[int]:
        return [self.below(bound) for _ in range(count)]


def xof_below(data: bytes, bound: int) -> int:
    return XofStream(data, chunk=32).below(bound)


def labelled(label: bytes, *fields: bytes) -> bytes:
    """Domain-separated XOF input: label followed by framed fields."""
    return label + frame(*fields)


def fields_of(x: bytes | Sequence[bytes]) -> tuple[bytes, ...]:
    """Instances are byte strings or tuples of byte strings (e.g. (pk, m))."""
    if isinstance(x, (bytes, bytearray)):
        return (bytes(x),)
    return tuple(bytes(f) for f in x)
