import { bytesToHex, utf8ToBytes } from "@noble/hashes/utils.js";
import { describe, expect, it } from "vitest";
import { encodeBiguint, encodeBytes, encodeStr, encodeU32, encodeU64, encodeU8 } from "../src/encoding";

describe("fixed-width integers", () => {
  it("encodes u8 as a single byte", () => {
    expect(bytesToHex(encodeU8(255))).toBe("ff");
    expect(bytesToHex(encodeU8(0))).toBe("00");
  });

  it("encodes u32 big-endian", () => {
    expect(bytesToHex(encodeU32(0x12345678))).toBe("12345678");
  });

  it("encodes u64 big-endian", () => {
    expect(bytesToHex(encodeU64(10n ** 18n))).toBe("0de0b6b3a7640000");
    expect(bytesToHex(encodeU64(1))).toBe("0000000000000001");
  });

  it("rejects out-of-range values", () => {
    expect(() => encodeU8(256)).toThrow(RangeError);
    expect(() => encodeU8(-1)).toThrow(RangeError);
    expect(() => encodeU32(2 ** 32)).toThrow(RangeError);
    expect(() => encodeU64(-1n)).toThrow(RangeError);
    expect(() => encodeU64(2n ** 64n)).toThrow(RangeError);
  });
});

describe("biguint", () => {
  it("encodes zero as a bare length prefix", () => {
    expect(bytesToHex(encodeBiguint(0n))).toBe("00000000");
  });

  it("uses the minimal big-endian magnitude", () => {
    expect(bytesToHex(encodeBiguint(10n ** 18n))).toBe("000000080de0b6b3a7640000");
    expect(bytesToHex(encodeBiguint(1n))).toBe("0000000101");
    expect(bytesToHex(encodeBiguint(256n))).toBe("000000020100");
  });

  it("handles 256-bit magnitudes", () => {
    expect(bytesToHex(encodeBiguint(2n ** 256n - 1n))).toBe("00000020" + "ff".repeat(32));
  });

  it("rejects negatives", () => {
    expect(() => encodeBiguint(-1n)).toThrow(RangeError);
  });

  // length prefix always equals the magnitude byte count
  it("keeps the prefix consistent with the magnitude across sizes", () => {
    for (let bits = 1; bits <= 521; bits += 13) {
      const value = (1n << BigInt(bits)) - 1n;
      const encoded = encodeBiguint(value);
      const declared = new DataView(encoded.buffer, encoded.byteOffset).getUint32(0, false);
      expect(encoded.length).toBe(4 + declared);
      expect(declared).toBe(Math.ceil(bits / 8));
      expect(encoded[4]).not.toBe(0); // no leading zero byte
    }
  });
});

describe("byte strings", () => {
  it("length-prefixes raw bytes", () => {
    expect(bytesToHex(encodeBytes(new Uint8Array()))).toBe("00000000");
    expect(bytesToHex(encodeBytes(utf8ToBytes("abc")))).toBe("00000003616263");
  });

  it("encodes strings as UTF-8 with a byte-length prefix", () => {
    expect(bytesToHex(encodeStr("abc"))).toBe("00000003616263");
    // two bytes per Greek letter: the prefix counts bytes, not code points
    expect(bytesToHex(encodeStr("καλημέρα"))).toBe("00000010cebaceb1cebbceb7cebcceadcf81ceb1");
  });
});
