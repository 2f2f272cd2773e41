/**
 * Per-tab session state: the API client, the local wallet, and login status.
 * Account switches are broadcast as a window event so any page showing the
 * address can update in place.
 */

import { bytesToHex } from "@noble/hashes/utils.js";
import { ApiClient, type FetchLike } from "./api";
import { createWallet, ensureWallet, saveWallet, type Wallet } from "./wallet";

export const ACCOUNTS_CHANGED_EVENT = "albank:accountschanged";

export interface Session {
  client: ApiClient;
  storage: Storage;
  wallet: Wallet | null;
  loggedIn: boolean;
}

export function createSession(
  endpoint: string,
  storage: Storage = window.localStorage,
  fetchFn?: FetchLike,
): Session {
  return { client: new ApiClient(endpoint, fetchFn), storage, wallet: null, loggedIn: false };
}

/** Load-or-create the wallet, then run challenge/response login. */
export async function connectWallet(session: Session): Promise<string> {
  const wallet = session.wallet ?? ensureWallet(session.storage);
  session.wallet = wallet;
  await session.client.login(wallet);
  session.loggedIn = true;
  return bytesToHex(wallet.address);
}

/** Replace the stored key, like switching accounts in a wallet extension. */
export function switchAccount(session: Session): string {
  const wallet = createWallet();
  saveWallet(session.storage, wallet);
  session.wallet = wallet;
  session.loggedIn = false; // the new key has no session until it logs in
  const address = bytesToHex(wallet.address);
  window.dispatchEvent(new CustomEvent(ACCOUNTS_CHANGED_EVENT, { detail: { address } }));
  return address;
}
