import { describe, expect, it } from "vitest";
import type { WriteReceipt } from "../src/api";
import { renderBankPage } from "../src/pages/bank";
import { click, freshRoot, setValue, stubSession, waitFor } from "./helpers";

const RECEIPT: WriteReceipt = {
  tx_id: "aa".repeat(32),
  success: true,
  block_height: 1,
  gas_used: 46000,
  network_fee: "46000000000000",
  elapsed_ms: 0.8,
  error_message: null,
  events: [],
};

describe("panel layout", () => {
  it("renders the deposit, withdraw, and balance groups", () => {
    const root = freshRoot();
    renderBankPage(root, stubSession({}));
    const groups = Array.from(root.querySelectorAll("[data-group]"), (el) =>
      el.getAttribute("data-group"),
    );
    expect(groups).toEqual(["deposit", "withdraw", "balance"]);
    expect(root.querySelector('[data-group="deposit"] button')!.textContent).toBe("Deposit");
    expect(root.querySelector('[data-group="withdraw"] button')!.textContent).toBe("Withdraw");
    expect(root.querySelector('[data-group="balance"] button')!.textContent).toBe(
      "Refresh Balance",
    );
  });

  it("keeps the balance read-only text, not an input", () => {
    const root = freshRoot();
    renderBankPage(root, stubSession({}));
    const balanceEl = root.querySelector('[data-role="balance"]')!;
    expect(balanceEl.tagName).toBe("P");
    expect(root.querySelectorAll('[data-group="balance"] input')).toHaveLength(0);
  });

  it("shows the account address", () => {
    const root = freshRoot();
    renderBankPage(root, stubSession({}));
    expect(root.querySelector('[data-role="account-address"]')!.textContent).toBe("00".repeat(20));
  });
});

describe("deposit and withdraw", () => {
  it("converts the ETH text exactly and reports the outcome with a duration", async () => {
    const root = freshRoot();
    const amounts: bigint[] = [];
    const session = stubSession({
      deposit: async (_w, wei) => {
        amounts.push(wei);
        return RECEIPT;
      },
    });
    renderBankPage(root, session);
    setValue(root, "depositAmount", "1");
    click(root.querySelector('[data-action="deposit"]'));

    const out = root.querySelector('[data-role="deposit-outcome"]') as HTMLElement;
    await waitFor(() => out.textContent !== "", "deposit outcome");
    expect(amounts).toEqual([10n ** 18n]);
    expect(out.textContent).toContain("Deposited 1 ETH");
    expect(out.textContent).toMatch(/\(\d+(\.\d+)? ms\)/);
  });

  it("rejects malformed amounts locally without calling the node", async () => {
    const root = freshRoot();
    let calls = 0;
    const session = stubSession({
      deposit: async () => {
        calls += 1;
        return RECEIPT;
      },
    });
    renderBankPage(root, session);
    setValue(root, "depositAmount", "abc");
    click(root.querySelector('[data-action="deposit"]'));

    const out = root.querySelector('[data-role="deposit-outcome"]') as HTMLElement;
    await waitFor(() => out.textContent !== "", "deposit outcome");
    expect(out.textContent).toContain("not a decimal amount");
    expect(calls).toBe(0);
  });

  it("renders server revert messages inline", async () => {
    const root = freshRoot();
    const session = stubSession({
      withdraw: async () => {
        const { ServerError } = await import("../src/api");
        throw new ServerError(422, "You do not have sufficient balance");
      },
    });
    renderBankPage(root, session);
    setValue(root, "withdrawAmount", "2");
    click(root.querySelector('[data-action="withdraw"]'));

    const out = root.querySelector('[data-role="withdraw-outcome"]') as HTMLElement;
    await waitFor(() => out.textContent !== "", "withdraw outcome");
    expect(out.textContent).toContain("You do not have sufficient balance");
    expect(out.classList.contains("error")).toBe(true);
  });

  it("disables both write buttons while a write is in flight", async () => {
    const root = freshRoot();
    let release: (r: WriteReceipt) => void = () => {};
    const gate = new Promise<WriteReceipt>((resolve) => {
      release = resolve;
    });
    const session = stubSession({ deposit: () => gate });
    renderBankPage(root, session);
    setValue(root, "depositAmount", "1");

    const depositBtn = root.querySelector('[data-action="deposit"]') as HTMLButtonElement;
    const withdrawBtn = root.querySelector('[data-action="withdraw"]') as HTMLButtonElement;
    click(depositBtn);
    await waitFor(() => depositBtn.disabled, "buttons disabled");
    expect(withdrawBtn.disabled).toBe(true);

    release(RECEIPT);
    await waitFor(() => !depositBtn.disabled, "buttons released");
    expect(withdrawBtn.disabled).toBe(false);
  });
});

describe("balance refresh", () => {
  it("renders the exact wei underneath the ETH display", async () => {
    const root = freshRoot();
    const session = stubSession({ balance: async () => 600000000000000000n });
    renderBankPage(root, session);
    click(root.querySelector('[data-action="refresh"]'));

    const balanceEl = root.querySelector('[data-role="balance"]') as HTMLElement;
    await waitFor(() => balanceEl.textContent !== "", "balance rendered");
    expect(balanceEl.textContent).toBe("0.6 ETH");
    expect(balanceEl.getAttribute("data-wei")).toBe("600000000000000000");
  });

  it("shows zero for a fresh account", async () => {
    const root = freshRoot();
    const session = stubSession({ balance: async () => 0n });
    renderBankPage(root, session);
    click(root.querySelector('[data-action="refresh"]'));

    const balanceEl = root.querySelector('[data-role="balance"]') as HTMLElement;
    await waitFor(() => balanceEl.textContent !== "", "balance rendered");
    expect(balanceEl.textContent).toBe("0 ETH");
    expect(balanceEl.getAttribute("data-wei")).toBe("0");
  });
});
