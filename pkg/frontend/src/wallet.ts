/**
 * In-browser ed25519 wallet.
 *
 * The node identifies accounts by the trailing 20 bytes of the public key's
 * SHA-256, and verifies 96-byte blobs laid out as verify_key(32) || sig(64).
 * The private key lives in localStorage; at desk scale the browser profile is
 * the custody boundary.
 */

import * as ed from "@noble/ed25519";
import { sha256, sha512 } from "@noble/hashes/sha2.js";
import { bytesToHex, concatBytes, hexToBytes, utf8ToBytes } from "@noble/hashes/utils.js";

// noble's sync signing needs the hash plugged in once at module load
ed.hashes.sha512 = sha512;

export const ADDRESS_LEN = 20;
export const SIGBLOB_LEN = 96;

const SEED_CONTEXT = utf8ToBytes("albank/wallet-seed/v1:");
const NONCE_CONTEXT = utf8ToBytes("albank/login-nonce/v1:");

export interface Wallet {
  privateKey: Uint8Array; // 32-byte ed25519 seed
  publicKey: Uint8Array; // 32-byte verification key
  address: Uint8Array; // 20 bytes, deriveAddress(publicKey)
}

export function deriveAddress(publicKey: Uint8Array): Uint8Array {
  return sha256(publicKey).slice(-ADDRESS_LEN);
}

function fromPrivateKey(privateKey: Uint8Array): Wallet {
  const publicKey = ed.getPublicKey(privateKey);
  return { privateKey, publicKey, address: deriveAddress(publicKey) };
}

/** Random wallet, or a deterministic one when a seed is given. */
export function createWallet(seed?: Uint8Array): Wallet {
  const raw =
    seed === undefined
      ? crypto.getRandomValues(new Uint8Array(32))
      : sha256(concatBytes(SEED_CONTEXT, seed));
  return fromPrivateKey(raw);
}

/** Sign and return the 96-byte key||signature blob the node verifies. */
export function signBlob(wallet: Wallet, message: Uint8Array): Uint8Array {
  return concatBytes(wallet.publicKey, ed.sign(message, wallet.privateKey));
}

export function signNonce(wallet: Wallet, nonceValue: Uint8Array): Uint8Array {
  return signBlob(wallet, concatBytes(NONCE_CONTEXT, nonceValue));
}

const STORAGE_KEY = "albank.wallet";

export function saveWallet(storage: Storage, wallet: Wallet): void {
  storage.setItem(STORAGE_KEY, bytesToHex(wallet.privateKey));
}

export function loadWallet(storage: Storage): Wallet | null {
  const hex = storage.getItem(STORAGE_KEY);
  if (!hex) return null;
  try {
    const raw = hexToBytes(hex);
    return raw.length === 32 ? fromPrivateKey(raw) : null;
  } catch {
    return null; // unreadable entry: treat as no wallet rather than crashing the page
  }
}

export function ensureWallet(storage: Storage): Wallet {
  const existing = loadWallet(storage);
  if (existing) return existing;
  const wallet = createWallet();
  saveWallet(storage, wallet);
  return wallet;
}
