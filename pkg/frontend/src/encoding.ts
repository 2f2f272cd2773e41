/**
 * Canonical binary encoding shared with the node: fixed-width big-endian
 * integers and u32-length-prefixed byte strings. Every byte emitted here
 * ends up under a signature or a hash, so this file must stay in lockstep
 * with the node's codec (format version 1).
 */

import { concatBytes, utf8ToBytes } from "@noble/hashes/utils.js";

export function encodeU8(value: number): Uint8Array {
  if (!Number.isInteger(value) || value < 0 || value > 0xff) {
    throw new RangeError(`u8 out of range: ${value}`);
  }
  return Uint8Array.of(value);
}

export function encodeU32(value: number): Uint8Array {
  if (!Number.isInteger(value) || value < 0 || value > 0xffff_ffff) {
    throw new RangeError(`u32 out of range: ${value}`);
  }
  const out = new Uint8Array(4);
  new DataView(out.buffer).setUint32(0, value, false);
  return out;
}

export function encodeU64(value: number | bigint): Uint8Array {
  const v = BigInt(value);
  if (v < 0n || v > 0xffff_ffff_ffff_ffffn) {
    throw new RangeError(`u64 out of range: ${value}`);
  }
  const out = new Uint8Array(8);
  new DataView(out.buffer).setBigUint64(0, v, false);
  return out;
}

/** Length-prefixed minimal big-endian magnitude; zero encodes as an empty one. */
export function encodeBiguint(value: number | bigint): Uint8Array {
  let v = BigInt(value);
  if (v < 0n) throw new RangeError("biguint must be non-negative");
  if (v === 0n) return encodeU32(0);
  const digits: number[] = [];
  while (v > 0n) {
    digits.push(Number(v & 0xffn));
    v >>= 8n;
  }
  digits.reverse(); // most significant byte first, no leading zero
  return concatBytes(encodeU32(digits.length), Uint8Array.from(digits));
}

export function encodeBytes(value: Uint8Array): Uint8Array {
  return concatBytes(encodeU32(value.length), value);
}

export function encodeStr(value: string): Uint8Array {
  return encodeBytes(utf8ToBytes(value));
}
