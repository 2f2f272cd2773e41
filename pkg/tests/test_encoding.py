"""Wire-format tests: golden vectors freeze format v1, properties cover
round-trips, strictness tests cover every rejection path."""

from __future__ import annotations

import struct

import pytest
from hypothesis import given, strategies as st

from albank.encoding import (
    MAX_FIELD_LEN,
    Reader,
    encode_biguint,
    encode_bytes,
    encode_str,
    encode_u8,
    encode_u32,
    encode_u64,
)
from albank.errors import DecodeError


class TestGoldenVectors:
    """Byte-exact expectations, cross-checked against struct.pack."""

    def test_u8(self):
        assert encode_u8(0) == b"\x00"
        assert encode_u8(0xAB) == struct.pack(">B", 0xAB)

    def test_u32(self):
        assert encode_u32(0) == b"\x00\x00\x00\x00"
        assert encode_u32(0xDEADBEEF) == struct.pack(">I", 0xDEADBEEF)

    def test_u64(self):
        assert encode_u64(1) == struct.pack(">Q", 1)
        assert encode_u64(2**64 - 1) == b"\xff" * 8

    def test_biguint_zero_is_empty_magnitude(self):
        assert encode_biguint(0) == b"\x00\x00\x00\x00"

    def test_biguint_small(self):
        assert encode_biguint(1) == b"\x00\x00\x00\x01\x01"
        assert encode_biguint(256) == b"\x00\x00\x00\x02\x01\x00"

    def test_biguint_one_ether(self):
        # 10^18 fits in 8 bytes; magnitude must match int.to_bytes
        raw = (10**18).to_bytes(8, "big")
        assert encode_biguint(10**18) == struct.pack(">I", 8) + raw

    def test_bytes_and_str(self):
        assert encode_bytes(b"") == b"\x00\x00\x00\x00"
        assert encode_bytes(b"abc") == b"\x00\x00\x00\x03abc"
        assert encode_str("héllo") == encode_bytes("héllo".encode("utf-8"))


class TestEncodeRangeChecks:
    def test_u8_range(self):
        with pytest.raises(ValueError):
            encode_u8(256)
        with pytest.raises(ValueError):
            encode_u8(-1)

    def test_u32_range(self):
        with pytest.raises(ValueError):
            encode_u32(2**32)

    def test_u64_range(self):
        with pytest.raises(ValueError):
            encode_u64(2**64)

    def test_biguint_negative(self):
        with pytest.raises(ValueError):
            encode_biguint(-1)


class TestRoundTrips:
    @given(st.integers(min_value=0, max_value=255))
    def test_u8(self, value):
        r = Reader(encode_u8(value))
        assert r.u8() == value
        r.expect_end()

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_u32(self, value):
        r = Reader(encode_u32(value))
        assert r.u32() == value
        r.expect_end()

    @given(st.integers(min_value=0, max_value=2**64 - 1))
    def test_u64(self, value):
        r = Reader(encode_u64(value))
        assert r.u64() == value
        r.expect_end()

    @given(st.integers(min_value=0, max_value=2**521))
    def test_biguint(self, value):
        r = Reader(encode_biguint(value))
        assert r.biguint() == value
        r.expect_end()

    @given(st.binary(max_size=512))
    def test_bytes(self, value):
        r = Reader(encode_bytes(value))
        assert r.bytes_() == value
        r.expect_end()

    @given(st.text(max_size=256))
    def test_str(self, value):
        r = Reader(encode_str(value))
        assert r.str_() == value
        r.expect_end()

    @given(st.integers(min_value=0, max_value=2**128), st.binary(max_size=64), st.text(max_size=64))
    def test_concatenated_fields(self, n, b, s):
        r = Reader(encode_biguint(n) + encode_bytes(b) + encode_str(s))
        assert (r.biguint(), r.bytes_(), r.str_()) == (n, b, s)
        r.expect_end()


class TestStrictDecoding:
    def test_short_read(self):
        with pytest.raises(DecodeError):
            Reader(b"\x00\x00\x00\x05ab").bytes_()

    def test_trailing_bytes_rejected(self):
        r = Reader(encode_u8(7) + b"x")
        r.u8()
        with pytest.raises(DecodeError):
            r.expect_end()

    def test_negative_take(self):
        with pytest.raises(DecodeError):
            Reader(b"abc").take(-1)

    def test_biguint_rejects_leading_zero(self):
        # non-minimal magnitude: 1 encoded in two bytes
        with pytest.raises(DecodeError):
            Reader(encode_u32(2) + b"\x00\x01").biguint()

    def test_oversized_length_prefix(self):
        with pytest.raises(DecodeError):
            Reader(encode_u32(MAX_FIELD_LEN + 1)).bytes_()
        with pytest.raises(DecodeError):
            Reader(encode_u32(MAX_FIELD_LEN + 1)).biguint()

    def test_invalid_utf8(self):
        with pytest.raises(DecodeError):
            Reader(encode_bytes(b"\xff\xfe")).str_()

    def test_remaining_tracks_cursor(self):
        r = Reader(b"abcdef")
        assert r.remaining == 6
        r.take(2)
        assert r.remaining == 4

    @given(st.binary(max_size=32))
    def test_truncation_always_detected(self, value):
        encoded = encode_bytes(value)
        for cut in range(len(encoded)):
            r = Reader(encoded[:cut])
            try:
                got = r.bytes_()
                r.expect_end()
            except DecodeError:
                continue
            raise AssertionError(f"truncated input decoded to {got!r}")
