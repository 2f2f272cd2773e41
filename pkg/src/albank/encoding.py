"""Canonical binary encoding for everything that gets hashed or signed.

Format version 1, frozen by golden-file tests:

- u8 / u32 / u64: fixed-width big-endian unsigned integers
- biguint: u32 length prefix + minimal big-endian magnitude (empty for 0)
- bytes: u32 length prefix + raw bytes
- str: UTF-8 bytes under the `bytes` rule
- composite records: fields concatenated in a fixed documented order

Decoding is strict: trailing bytes, short reads, and oversized length
prefixes are errors.
"""

from __future__ import annotations

from albank.errors import DecodeError

FORMAT_VERSION = 1

# Guards decode against absurd length prefixes in corrupted input.
MAX_FIELD_LEN = 16 * 1024 * 1024


def encode_u8(value: int) -> bytes:
    if not 0 <= value <= 0xFF:
        raise ValueError(f"u8 out of range: {value}")
    return value.to_bytes(1, "big")


def encode_u32(value: int) -> bytes:
    if not 0 <= value <= 0xFFFFFFFF:
        raise ValueError(f"u32 out of range: {value}")
    return value.to_bytes(4, "big")


def encode_u64(value: int) -> bytes:
    if not 0 <= value <= 0xFFFFFFFFFFFFFFFF:
        raise ValueError(f"u64 out of range: {value}")
    return value.to_bytes(8, "big")


def encode_biguint(value: int) -> bytes:
    if value < 0:
        raise ValueError(f"biguint must be non-negative: {value}")
    if value == 0:
        return encode_u32(0)
    raw = value.to_bytes((value.bit_length() + 7) // 8, "big")
    return encode_u32(len(raw)) + raw


def encode_bytes(value: bytes) -> bytes:
    return encode_u32(len(value)) + value


def encode_str(value: str) -> bytes:
    return encode_bytes(value.encode("utf-8"))


class Reader:
    """Strict cursor over an encoded byte string."""

    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0

    def take(self, n: int) -> bytes:
        if n < 0 or self._pos + n > len(self._data):
            raise DecodeError(f"short read: wanted {n} bytes at offset {self._pos}")
        chunk = self._data[self._pos : self._pos + n]
        self._pos += n
        return chunk

    def u8(self) -> int:
        return self.take(1)[0]

    def u32(self) -> int:
        return int.from_bytes(self.take(4), "big")

    def u64(self) -> int:
        return int.from_bytes(self.take(8), "big")

    def biguint(self) -> int:
        n = self.u32()
        if n > MAX_FIELD_LEN:
            raise DecodeError(f"biguint length {n} exceeds limit")
        raw = self.take(n)
        if n > 0 and raw[0] == 0:
            raise DecodeError("biguint not minimally encoded")
        return int.from_bytes(raw, "big")

    def bytes_(self) -> bytes:
        n = self.u32()
        if n > MAX_FIELD_LEN:
            raise DecodeError(f"bytes length {n} exceeds limit")
        return self.take(n)

    def str_(self) -> str:
        raw = self.bytes_()
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DecodeError(f"invalid UTF-8: {exc}") from exc

    def expect_end(self) -> None:
        if self._pos != len(self._data):
            raise DecodeError(f"{len(self._data) - self._pos} trailing bytes")

    @property
    def remaining(self) -> int:
        return len(self._data) - self._pos
