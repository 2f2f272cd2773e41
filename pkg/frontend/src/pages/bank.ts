/**
 * Bank account page: deposit, withdraw, and balance groups. Amounts are
 * entered in ETH and converted to exact wei before any request; every action
 * reports its outcome inline together with the round-trip time. At most one
 * write is in flight at a time; the write buttons stay disabled meanwhile.
 */

import { bytesToHex } from "@noble/hashes/utils.js";
import type { Session } from "../session";
import { ethToWei, weiToEthStr } from "../units";

export function renderBankPage(root: HTMLElement, session: Session): void {
  root.innerHTML = `
    <section class="card bank-card">
      <h2>Bank Account</h2>
      <p class="address">Account: <span data-role="account-address"></span></p>
      <div class="panel-group" data-group="deposit">
        <h3>Deposit</h3>
        <label class="field">
          <span class="field-label">Amount (ETH)</span>
          <input name="depositAmount" type="text" />
        </label>
        <button class="primary" data-action="deposit">Deposit</button>
        <p class="outcome" data-role="deposit-outcome"></p>
      </div>
      <div class="panel-group" data-group="withdraw">
        <h3>Withdraw</h3>
        <label class="field">
          <span class="field-label">Amount (ETH)</span>
          <input name="withdrawAmount" type="text" />
        </label>
        <button class="primary" data-action="withdraw">Withdraw</button>
        <p class="outcome" data-role="withdraw-outcome"></p>
      </div>
      <div class="panel-group" data-group="balance">
        <h3>Balance</h3>
        <p class="balance" data-role="balance" data-wei=""></p>
        <button data-action="refresh">Refresh Balance</button>
        <p class="outcome" data-role="balance-outcome"></p>
      </div>
    </section>
  `;

  const addressEl = root.querySelector('[data-role="account-address"]') as HTMLElement;
  const depositInput = root.querySelector('[name="depositAmount"]') as HTMLInputElement;
  const withdrawInput = root.querySelector('[name="withdrawAmount"]') as HTMLInputElement;
  const depositBtn = root.querySelector('[data-action="deposit"]') as HTMLButtonElement;
  const withdrawBtn = root.querySelector('[data-action="withdraw"]') as HTMLButtonElement;
  const refreshBtn = root.querySelector('[data-action="refresh"]') as HTMLButtonElement;
  const balanceEl = root.querySelector('[data-role="balance"]') as HTMLElement;

  const outcome = (group: string) =>
    root.querySelector(`[data-role="${group}-outcome"]`) as HTMLElement;

  if (session.wallet) addressEl.textContent = bytesToHex(session.wallet.address);

  const wallet = () => {
    if (!session.loggedIn || !session.wallet) throw new Error("Connect your wallet first");
    return session.wallet;
  };

  let writePending = false;
  const writeButtons = [depositBtn, withdrawBtn];

  const runAction = async (
    target: HTMLElement,
    isWrite: boolean,
    action: () => Promise<string>,
  ) => {
    if (isWrite) {
      if (writePending) return;
      writePending = true;
      for (const b of writeButtons) b.disabled = true;
    }
    const start = performance.now();
    try {
      const detail = await action();
      target.classList.remove("error");
      target.textContent = `${detail} (${(performance.now() - start).toFixed(1)} ms)`;
    } catch (err) {
      target.classList.add("error");
      target.textContent = `${(err as Error).message} (${(performance.now() - start).toFixed(1)} ms)`;
    } finally {
      if (isWrite) {
        writePending = false;
        for (const b of writeButtons) b.disabled = false;
      }
    }
  };

  depositBtn.addEventListener("click", () =>
    runAction(outcome("deposit"), true, async () => {
      const wei = ethToWei(depositInput.value);
      const receipt = await session.client.deposit(wallet(), wei);
      return `Deposited ${weiToEthStr(wei)} ETH, gas ${receipt.gas_used}`;
    }),
  );

  withdrawBtn.addEventListener("click", () =>
    runAction(outcome("withdraw"), true, async () => {
      const wei = ethToWei(withdrawInput.value);
      const receipt = await session.client.withdraw(wallet(), wei);
      return `Withdrew ${weiToEthStr(wei)} ETH, gas ${receipt.gas_used}`;
    }),
  );

  refreshBtn.addEventListener("click", () =>
    runAction(outcome("balance"), false, async () => {
      const wei = await session.client.balance(wallet().address);
      balanceEl.textContent = `${weiToEthStr(wei)} ETH`;
      balanceEl.setAttribute("data-wei", wei.toString());
      return "Balance refreshed";
    }),
  );
}
