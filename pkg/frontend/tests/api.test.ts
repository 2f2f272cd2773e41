import { bytesToHex } from "@noble/hashes/utils.js";
import { describe, expect, it } from "vitest";
import { ApiClient, ServerError } from "../src/api";
import { createWallet } from "../src/wallet";
import { SAMPLE_RECORD, SEED7, SEED7_ADDRESS } from "./vectors";

/** Every path the client may touch; anything else is a private channel. */
const DOCUMENTED_ROUTES = [
  /^\/auth\/challenge$/,
  /^\/auth\/login$/,
  /^\/bank\/customers$/,
  /^\/kyc$/,
  /^\/bank\/deposit$/,
  /^\/bank\/withdraw$/,
  /^\/bank\/balance\/[0-9a-f]{40}$/,
  /^\/account\/[0-9a-f]{40}$/,
  /^\/kyc\/[0-9a-f]+$/,
  /^\/chain\/tx\/[0-9a-f]{64}$/,
  /^\/chain\/verify$/,
  /^\/metrics$/,
];

interface Recorded {
  method: string;
  path: string;
  headers: Record<string, string>;
  body: any;
}

function recordingFetch(responses: Record<string, unknown> = {}) {
  const calls: Recorded[] = [];
  const fetchFn = async (url: string, init: RequestInit): Promise<Response> => {
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    calls.push({
      method: init.method ?? "GET",
      path,
      headers: (init.headers ?? {}) as Record<string, string>,
      body: init.body ? JSON.parse(init.body as string) : undefined,
    });
    const key = Object.keys(responses).find((k) => path.startsWith(k));
    const body = key !== undefined ? responses[key] : {};
    return new Response(JSON.stringify(body), { status: 200 });
  };
  return { calls, fetchFn };
}

const CANNED = {
  "/auth/challenge": { nonce: "ab".repeat(32), issued_at: 0, expires_at: 60000 },
  "/auth/login": { token: "cd".repeat(48), subject: SEED7_ADDRESS, issued_at: 0, expires_at: 1 },
  "/account": { address: SEED7_ADDRESS, balance: "0", next_sequence: 1 },
  "/bank/balance": { address: SEED7_ADDRESS, balance: "600000000000000000" },
};

describe("endpoint discipline", () => {
  it("touches only documented routes across the whole surface", async () => {
    const { calls, fetchFn } = recordingFetch(CANNED);
    const client = new ApiClient("http://node", fetchFn);
    const wallet = createWallet(SEED7);

    await client.login(wallet);
    await client.account(wallet.address);
    await client.balance(wallet.address);
    await client.getKyc("ab".repeat(16));
    await client.getTx("00".repeat(32));
    await client.verifyChain();
    await client.metrics();
    await client.addCustomer(wallet);
    await client.submitKyc(wallet, SAMPLE_RECORD, "11".repeat(32));
    await client.deposit(wallet, 10n ** 18n);
    await client.withdraw(wallet, 4n * 10n ** 17n);

    expect(calls.length).toBeGreaterThan(10);
    for (const call of calls) {
      expect(
        DOCUMENTED_ROUTES.some((route) => route.test(call.path)),
        `undocumented path: ${call.path}`,
      ).toBe(true);
    }
  });
});

describe("session token handling", () => {
  it("attaches the bearer token after login, not before", async () => {
    const { calls, fetchFn } = recordingFetch(CANNED);
    const client = new ApiClient("http://node", fetchFn);
    const wallet = createWallet(SEED7);

    await client.verifyChain();
    expect(calls[0]!.headers.authorization).toBeUndefined();

    await client.login(wallet);
    await client.deposit(wallet, 100n);
    const depositCall = calls.find((c) => c.path === "/bank/deposit")!;
    expect(depositCall.headers.authorization).toBe(`Bearer ${"cd".repeat(48)}`);
  });
});

describe("write bodies", () => {
  it("ships the signed transaction with a decimal amount string", async () => {
    const { calls, fetchFn } = recordingFetch(CANNED);
    const client = new ApiClient("http://node", fetchFn);
    const wallet = createWallet(SEED7);
    await client.login(wallet);
    await client.deposit(wallet, 10n ** 18n);

    const body = calls.find((c) => c.path === "/bank/deposit")!.body;
    expect(body.tx.sender).toBe(SEED7_ADDRESS);
    expect(body.tx.operation).toBe("deposit");
    expect(body.tx.value).toBe("1000000000000000000");
    expect(body.tx.sequence).toBe(1); // from the account endpoint
    expect(body.tx.signature).toMatch(/^[0-9a-f]{192}$/);
    expect(body.tx.tx_id).toMatch(/^[0-9a-f]{64}$/);
  });

  it("sends the record and the document digest alongside a registration", async () => {
    const { calls, fetchFn } = recordingFetch(CANNED);
    const client = new ApiClient("http://node", fetchFn);
    const wallet = createWallet(SEED7);
    await client.login(wallet);
    await client.submitKyc(wallet, SAMPLE_RECORD, "11".repeat(32));

    const body = calls.find((c) => c.path === "/kyc")!.body;
    expect(body.record).toEqual(SAMPLE_RECORD);
    expect(body.id_file_sha256).toBe("11".repeat(32));
    expect(body.tx.operation).toBe("register_kyc");
    expect(body.tx.payload.length).toBeGreaterThan(2 * (195 + 16 + 12 + 16 + 32));
  });

  it("omits the digest key when no document was attached", async () => {
    const { calls, fetchFn } = recordingFetch(CANNED);
    const client = new ApiClient("http://node", fetchFn);
    const wallet = createWallet(SEED7);
    await client.login(wallet);
    await client.submitKyc(wallet, SAMPLE_RECORD);
    expect("id_file_sha256" in calls.find((c) => c.path === "/kyc")!.body).toBe(false);
  });
});

describe("error surfacing", () => {
  it("raises ServerError carrying the server's message verbatim", async () => {
    const fetchFn = async () =>
      new Response(JSON.stringify({ message: "Please deposit at least 10 wei" }), { status: 422 });
    const client = new ApiClient("http://node", fetchFn);
    const err = await client.get("/chain/verify").catch((e) => e);
    expect(err).toBeInstanceOf(ServerError);
    expect(err.status).toBe(422);
    expect(err.message).toBe("Please deposit at least 10 wei");
  });

  it("falls back to the status code when the body is not JSON", async () => {
    const fetchFn = async () => new Response("gateway exploded", { status: 502 });
    const client = new ApiClient("http://node", fetchFn);
    const err = await client.get("/metrics").catch((e) => e);
    expect(err.message).toBe("HTTP 502");
  });

  it("wraps transport failures with the endpoint name", async () => {
    const fetchFn = async () => {
      throw new TypeError("fetch failed");
    };
    const client = new ApiClient("http://unreachable:1", fetchFn);
    const err = await client.get("/metrics").catch((e) => e);
    expect(err.message).toContain("cannot reach http://unreachable:1");
  });
});

describe("address hex helper behavior", () => {
  it("hex-encodes addresses into paths", async () => {
    const { calls, fetchFn } = recordingFetch(CANNED);
    const client = new ApiClient("http://node", fetchFn);
    const address = createWallet(SEED7).address;
    await client.balance(address);
    expect(calls[0]!.path).toBe(`/bank/balance/${bytesToHex(address)}`);
  });
});
