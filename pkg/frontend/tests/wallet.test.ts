import * as ed from "@noble/ed25519";
import { bytesToHex, concatBytes, utf8ToBytes } from "@noble/hashes/utils.js";
import { describe, expect, it } from "vitest";
import { createWallet, deriveAddress, ensureWallet, loadWallet, saveWallet, signNonce } from "../src/wallet";
import { NONCE_VALUE, SEED7, SEED7_ADDRESS, SEED7_NONCE_BLOB, SEED7_PUBLIC } from "./vectors";

describe("key derivation", () => {
  it("derives the node's keypair and address from a seed", () => {
    const wallet = createWallet(SEED7);
    expect(bytesToHex(wallet.publicKey)).toBe(SEED7_PUBLIC);
    expect(bytesToHex(wallet.address)).toBe(SEED7_ADDRESS);
  });

  it("address is the trailing 20 bytes of the key hash", () => {
    const wallet = createWallet(SEED7);
    expect(deriveAddress(wallet.publicKey)).toHaveLength(20);
    expect(bytesToHex(deriveAddress(wallet.publicKey))).toBe(SEED7_ADDRESS);
  });

  it("random wallets differ", () => {
    expect(bytesToHex(createWallet().address)).not.toBe(bytesToHex(createWallet().address));
  });
});

describe("nonce signatures", () => {
  it("produces the exact 96-byte blob the node verifies", () => {
    const blob = signNonce(createWallet(SEED7), NONCE_VALUE);
    expect(blob).toHaveLength(96);
    expect(bytesToHex(blob)).toBe(SEED7_NONCE_BLOB);
  });

  it("embeds a verifiable signature over the domain-separated nonce", () => {
    const wallet = createWallet(SEED7);
    const blob = signNonce(wallet, NONCE_VALUE);
    const message = concatBytes(utf8ToBytes("albank/login-nonce/v1:"), NONCE_VALUE);
    expect(ed.verify(blob.slice(32), message, blob.slice(0, 32))).toBe(true);
  });
});

describe("persistence", () => {
  it("round-trips through storage", () => {
    window.localStorage.clear();
    const wallet = createWallet(SEED7);
    saveWallet(window.localStorage, wallet);
    const loaded = loadWallet(window.localStorage);
    expect(loaded).not.toBeNull();
    expect(bytesToHex(loaded!.address)).toBe(SEED7_ADDRESS);
  });

  it("treats garbage entries as no wallet", () => {
    window.localStorage.clear();
    window.localStorage.setItem("albank.wallet", "not hex");
    expect(loadWallet(window.localStorage)).toBeNull();
    window.localStorage.setItem("albank.wallet", "00ff"); // wrong length
    expect(loadWallet(window.localStorage)).toBeNull();
  });

  it("ensureWallet creates once and then reuses", () => {
    window.localStorage.clear();
    const first = ensureWallet(window.localStorage);
    const second = ensureWallet(window.localStorage);
    expect(bytesToHex(first.address)).toBe(bytesToHex(second.address));
  });
});
