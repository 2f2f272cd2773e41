/**
 * Wallet login page: one connect button. On success the address replaces the
 * button and navigation opens up; authentication errors render inline.
 */

import { ACCOUNTS_CHANGED_EVENT, connectWallet, type Session } from "../session";

export function renderLoginPage(
  root: HTMLElement,
  session: Session,
  onLoggedIn: (address: string) => void = () => {},
): void {
  root.innerHTML = `
    <section class="card login-card">
      <h2>Wallet Login</h2>
      <p>Connect your wallet to continue</p>
      <button class="primary" data-action="connect">Connect Wallet</button>
      <p class="address" data-role="address" hidden></p>
      <p class="error" data-role="error" hidden></p>
    </section>
  `;

  const button = root.querySelector('[data-action="connect"]') as HTMLButtonElement;
  const addressEl = root.querySelector('[data-role="address"]') as HTMLElement;
  const errorEl = root.querySelector('[data-role="error"]') as HTMLElement;

  const showAddress = (address: string) => {
    button.hidden = true;
    addressEl.hidden = false;
    addressEl.textContent = address;
  };

  if (session.loggedIn && session.wallet) {
    showAddress(Array.from(session.wallet.address, (b) => b.toString(16).padStart(2, "0")).join(""));
  }

  window.addEventListener(ACCOUNTS_CHANGED_EVENT, (event) => {
    if (!addressEl.isConnected || addressEl.hidden) return; // page gone or not logged in yet
    addressEl.textContent = (event as CustomEvent<{ address: string }>).detail.address;
  });

  button.addEventListener("click", async () => {
    button.disabled = true;
    errorEl.hidden = true;
    try {
      const address = await connectWallet(session);
      showAddress(address);
      onLoggedIn(address);
    } catch (err) {
      errorEl.hidden = false;
      errorEl.textContent = (err as Error).message;
    } finally {
      button.disabled = false;
    }
  });
}
