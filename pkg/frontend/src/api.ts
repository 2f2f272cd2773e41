/**
 * JSON client for the node API. Transactions are signed locally and shipped
 * as JSON; the session token rides in the Authorization header. Non-2xx
 * responses surface as ServerError carrying the server's message verbatim.
 */

import { bytesToHex, hexToBytes } from "@noble/hashes/utils.js";
import { encodeBiguint } from "./encoding";
import { buildRegisterPayload, type RegistrationRecord } from "./kyc";
import { Operation, signTransaction, txJson, type Transaction } from "./tx";
import { signNonce, type Wallet } from "./wallet";

export class ServerError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly body: Record<string, unknown> = {},
  ) {
    super(message);
    this.name = "ServerError";
  }
}

export type FetchLike = (url: string, init: RequestInit) => Promise<Response>;

export interface LoginGrant {
  token: string;
  subject: string;
  issued_at: number;
  expires_at: number;
}

export interface WriteReceipt {
  tx_id: string;
  success: boolean;
  block_height: number;
  gas_used: number;
  network_fee: string;
  elapsed_ms: number;
  error_message: string | null;
  events: { name: string; args: string[] }[];
  kyc_token?: string;
}

export class ApiClient {
  tokenHex: string | null = null;
  private readonly fetchFn: FetchLike;

  constructor(
    readonly endpoint: string,
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request(method: string, path: string, jsonBody?: unknown): Promise<any> {
    const headers: Record<string, string> = {};
    if (jsonBody !== undefined) headers["content-type"] = "application/json";
    if (this.tokenHex) headers["authorization"] = `Bearer ${this.tokenHex}`;
    let resp: Response;
    try {
      resp = await this.fetchFn(this.endpoint + path, {
        method,
        headers,
        body: jsonBody === undefined ? undefined : JSON.stringify(jsonBody),
      });
    } catch (err) {
      throw new Error(`cannot reach ${this.endpoint || "the node"}: ${(err as Error).message}`);
    }
    let body: any = {};
    try {
      body = await resp.json();
    } catch {
      body = {};
    }
    if (resp.status >= 300) {
      const message =
        body && typeof body.message === "string" ? body.message : `HTTP ${resp.status}`;
      throw new ServerError(resp.status, message, body);
    }
    return body;
  }

  get(path: string): Promise<any> {
    return this.request("GET", path);
  }

  post(path: string, jsonBody: unknown): Promise<any> {
    return this.request("POST", path, jsonBody);
  }

  /** Challenge-response login; caches the session token on success. */
  async login(wallet: Wallet): Promise<LoginGrant> {
    const challenge = await this.post("/auth/challenge", {
      address: bytesToHex(wallet.address),
    });
    const signature = signNonce(wallet, hexToBytes(challenge.nonce));
    const granted: LoginGrant = await this.post("/auth/login", {
      address: bytesToHex(wallet.address),
      nonce: challenge.nonce,
      signature: bytesToHex(signature),
    });
    this.tokenHex = granted.token;
    return granted;
  }

  account(address: Uint8Array): Promise<any> {
    return this.get(`/account/${bytesToHex(address)}`);
  }

  async nextSequence(address: Uint8Array): Promise<number> {
    return Number((await this.account(address)).next_sequence);
  }

  async balance(address: Uint8Array): Promise<bigint> {
    const body = await this.get(`/bank/balance/${bytesToHex(address)}`);
    return BigInt(body.balance);
  }

  getKyc(handleHex: string): Promise<any> {
    return this.get(`/kyc/${handleHex}`);
  }

  getTx(txIdHex: string): Promise<any> {
    return this.get(`/chain/tx/${txIdHex}`);
  }

  verifyChain(): Promise<any> {
    return this.get("/chain/verify");
  }

  metrics(): Promise<any> {
    return this.get("/metrics");
  }

  private async buildTx(
    wallet: Wallet,
    operation: Operation,
    value: bigint,
    payload: Uint8Array,
  ): Promise<Transaction> {
    const sequence = await this.nextSequence(wallet.address);
    return signTransaction(wallet, operation, value, payload, sequence);
  }

  async addCustomer(wallet: Wallet): Promise<WriteReceipt> {
    const tx = await this.buildTx(wallet, Operation.AddCustomer, 0n, new Uint8Array());
    return this.post("/bank/customers", { tx: txJson(tx) });
  }

  /** Encrypt, sign, and submit a registration; the plain record travels
   * alongside for the node's own validation and store. */
  async submitKyc(
    wallet: Wallet,
    record: RegistrationRecord,
    idFileSha256?: string,
  ): Promise<WriteReceipt> {
    const payload = buildRegisterPayload(wallet, record);
    const tx = await this.buildTx(wallet, Operation.RegisterKyc, 0n, payload);
    const body: Record<string, unknown> = { tx: txJson(tx), record };
    if (idFileSha256) body.id_file_sha256 = idFileSha256; // extra top-level keys are fine
    return this.post("/kyc", body);
  }

  async deposit(wallet: Wallet, amountWei: bigint): Promise<WriteReceipt> {
    const tx = await this.buildTx(wallet, Operation.Deposit, amountWei, new Uint8Array());
    return this.post("/bank/deposit", { tx: txJson(tx) });
  }

  async withdraw(wallet: Wallet, amountWei: bigint): Promise<WriteReceipt> {
    const tx = await this.buildTx(wallet, Operation.Withdraw, 0n, encodeBiguint(amountWei));
    return this.post("/bank/withdraw", { tx: txJson(tx) });
  }
}
