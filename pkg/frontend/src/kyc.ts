/**
 * Registration records: client-side validation, the canonical record
 * encoding, and the encrypted payload that rides inside a register
 * transaction.
 *
 * The ciphertext key is derived from the wallet's private key, so only the
 * submitting user can read the stored personal data back; the node sees a
 * commitment it can bind into the chain plus a key tag for later lookup.
 * Validation failures reuse the node's exact message strings so the form
 * shows the same text whether a rule trips locally or server-side.
 */

import { chacha20poly1305 } from "@noble/ciphers/chacha.js";
import { hkdf } from "@noble/hashes/hkdf.js";
import { sha256 } from "@noble/hashes/sha2.js";
import { bytesToHex, concatBytes, utf8ToBytes } from "@noble/hashes/utils.js";
import { encodeBiguint, encodeBytes, encodeStr } from "./encoding";
import type { Wallet } from "./wallet";

export interface RegistrationRecord {
  firstName: string;
  middleName: string;
  lastName: string;
  dob: string;
  email: string;
  phone: string;
  maritalStatus: string;
  address_: string;
  city: string;
  state: string;
  country: string;
  zip: string;
  nationality: string;
  occupation: string;
  employmentStatus: string;
  annualIncome: number;
  idType: string;
  idNumber: string;
  idExpiry: string;
}

/** Canonical struct order; the record encoding walks exactly this list. */
export const RECORD_FIELDS = [
  "firstName",
  "middleName",
  "lastName",
  "dob",
  "email",
  "phone",
  "maritalStatus",
  "address_",
  "city",
  "state",
  "country",
  "zip",
  "nationality",
  "occupation",
  "employmentStatus",
  "annualIncome",
  "idType",
  "idNumber",
  "idExpiry",
] as const satisfies readonly (keyof RegistrationRecord)[];

export function emptyRecord(): RegistrationRecord {
  return {
    firstName: "",
    middleName: "",
    lastName: "",
    dob: "",
    email: "",
    phone: "",
    maritalStatus: "",
    address_: "",
    city: "",
    state: "",
    country: "",
    zip: "",
    nationality: "",
    occupation: "",
    employmentStatus: "",
    annualIncome: 0,
    idType: "",
    idNumber: "",
    idExpiry: "",
  };
}

// completeness rules, checked in this order; messages are node-exact
export const REQUIRED_FIELDS: ReadonlyArray<readonly [keyof RegistrationRecord, string]> = [
  ["firstName", "First name is required"],
  ["lastName", "Last name is required"],
  ["dob", "Date of birth is required"],
  ["email", "Email is required"],
  ["phone", "Phone number is required"],
  ["address_", "Address is required"],
  ["city", "City is required"],
  ["state", "State is required"],
  ["country", "Country is required"],
  ["zip", "ZIP code is required"],
  ["idType", "ID type is required"],
  ["idNumber", "ID number is required"],
];

export const MSG_DOB_SHAPE = "Date of birth must use YYYY-MM-DD format";
export const MSG_ID_EXPIRY_SHAPE = "ID expiry date must use YYYY-MM-DD format";
export const MSG_EMAIL_SHAPE = "Email must contain a local part and a domain";
export const MSG_INCOME_NEGATIVE = "Annual income must be non-negative";

const DATE_SHAPE = /^\d{4}-\d{2}-\d{2}$/;

export type ValidationFailure = readonly [field: string, message: string];

/** Pure completeness/shape check mirroring the node; lists every violated rule. */
export function validateKyc(record: RegistrationRecord): ValidationFailure[] {
  const failures: ValidationFailure[] = [];
  for (const [name, message] of REQUIRED_FIELDS) {
    if (!record[name]) failures.push([name, message]);
  }
  if (record.dob && !DATE_SHAPE.test(record.dob)) failures.push(["dob", MSG_DOB_SHAPE]);
  if (record.idExpiry && !DATE_SHAPE.test(record.idExpiry)) {
    failures.push(["idExpiry", MSG_ID_EXPIRY_SHAPE]);
  }
  if (record.email) {
    const at = record.email.indexOf("@");
    const local = at < 0 ? record.email : record.email.slice(0, at);
    const domain = at < 0 ? "" : record.email.slice(at + 1);
    if (!local || !domain) failures.push(["email", MSG_EMAIL_SHAPE]);
  }
  if (record.annualIncome < 0) failures.push(["annualIncome", MSG_INCOME_NEGATIVE]);
  return failures;
}

const KEY_INFO = utf8ToBytes("albank/kyc-payload-key/v1");
const AAD_CONTEXT = utf8ToBytes("albank/kyc-payload/v1:");
const KEY_TAG_CONTEXT = utf8ToBytes("albank/kyc-key-tag/v1:");
const COMMIT_CONTEXT = utf8ToBytes("albank/kyc-record/v1:");

export const KEY_TAG_LEN = 16;
export const AEAD_NONCE_LEN = 12;

/** Canonical encoding of the 19 registration fields, struct order. */
export function encodeRecord(record: RegistrationRecord): Uint8Array {
  const parts: Uint8Array[] = [];
  for (const name of RECORD_FIELDS) {
    parts.push(
      name === "annualIncome"
        ? encodeBiguint(BigInt(record.annualIncome))
        : encodeStr(record[name]),
    );
  }
  return concatBytes(...parts);
}

export function recordCommitment(record: RegistrationRecord): Uint8Array {
  return sha256(concatBytes(COMMIT_CONTEXT, encodeRecord(record)));
}

export function payloadKey(wallet: Wallet): Uint8Array {
  return hkdf(sha256, wallet.privateKey, undefined, KEY_INFO, 32);
}

export function keyTagFor(wallet: Wallet): Uint8Array {
  return sha256(concatBytes(KEY_TAG_CONTEXT, wallet.publicKey)).slice(0, KEY_TAG_LEN);
}

/** ciphertext || nonce || key tag (each length-prefixed) + raw 32-byte commitment. */
export function buildRegisterPayload(
  wallet: Wallet,
  record: RegistrationRecord,
  nonce?: Uint8Array,
): Uint8Array {
  const n = nonce ?? crypto.getRandomValues(new Uint8Array(AEAD_NONCE_LEN));
  const aead = chacha20poly1305(payloadKey(wallet), n, concatBytes(AAD_CONTEXT, wallet.address));
  const ciphertext = aead.encrypt(encodeRecord(record));
  return concatBytes(
    encodeBytes(ciphertext),
    encodeBytes(n),
    encodeBytes(keyTagFor(wallet)),
    recordCommitment(record),
  );
}

/** SHA-256 of an uploaded document, hex; travels alongside the form record. */
export async function fileSha256Hex(file: File): Promise<string> {
  const raw = new Uint8Array(await file.arrayBuffer());
  return bytesToHex(sha256(raw));
}
