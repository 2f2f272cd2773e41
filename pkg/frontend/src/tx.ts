/**
 * Transaction construction. Sign bytes and the transaction id are derived
 * from the same canonical body the node recomputes on receipt, so any drift
 * here is rejected server-side with a 422.
 */

import { sha256 } from "@noble/hashes/sha2.js";
import { bytesToHex, concatBytes, utf8ToBytes } from "@noble/hashes/utils.js";
import { encodeBiguint, encodeBytes, encodeU64, encodeU8 } from "./encoding";
import { signBlob, type Wallet } from "./wallet";

export enum Operation {
  AddCustomer = 1,
  RegisterKyc = 2,
  Deposit = 3,
  Withdraw = 4,
}

const WIRE_NAMES: Record<Operation, string> = {
  [Operation.AddCustomer]: "add_customer",
  [Operation.RegisterKyc]: "register_kyc",
  [Operation.Deposit]: "deposit",
  [Operation.Withdraw]: "withdraw",
};

const SIGN_CONTEXT = utf8ToBytes("albank/tx/v1:");
const ID_CONTEXT = utf8ToBytes("albank/txid/v1:");

export interface Transaction {
  sender: Uint8Array;
  operation: Operation;
  value: bigint;
  payload: Uint8Array;
  sequence: number;
  signature: Uint8Array;
  txId: Uint8Array;
}

function txBody(
  sender: Uint8Array,
  operation: Operation,
  value: bigint,
  payload: Uint8Array,
  sequence: number,
): Uint8Array {
  return concatBytes(
    sender,
    encodeU8(operation),
    encodeBiguint(value),
    encodeBytes(payload),
    encodeU64(sequence),
  );
}

export function transactionSignBytes(
  sender: Uint8Array,
  operation: Operation,
  value: bigint,
  payload: Uint8Array,
  sequence: number,
): Uint8Array {
  return concatBytes(SIGN_CONTEXT, txBody(sender, operation, value, payload, sequence));
}

export function computeTxId(
  sender: Uint8Array,
  operation: Operation,
  value: bigint,
  payload: Uint8Array,
  sequence: number,
  signature: Uint8Array,
): Uint8Array {
  return sha256(
    concatBytes(ID_CONTEXT, txBody(sender, operation, value, payload, sequence), encodeBytes(signature)),
  );
}

export function signTransaction(
  wallet: Wallet,
  operation: Operation,
  value: bigint,
  payload: Uint8Array,
  sequence: number,
): Transaction {
  const signature = signBlob(
    wallet,
    transactionSignBytes(wallet.address, operation, value, payload, sequence),
  );
  const txId = computeTxId(wallet.address, operation, value, payload, sequence, signature);
  return { sender: wallet.address, operation, value, payload, sequence, signature, txId };
}

/** Wire shape: hex for byte fields, decimal string for the amount. */
export function txJson(tx: Transaction): Record<string, unknown> {
  return {
    sender: bytesToHex(tx.sender),
    operation: WIRE_NAMES[tx.operation],
    value: tx.value.toString(),
    payload: bytesToHex(tx.payload),
    sequence: tx.sequence,
    signature: bytesToHex(tx.signature),
    tx_id: bytesToHex(tx.txId),
  };
}
