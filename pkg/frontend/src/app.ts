/**
 * Application shell: top bar, hash routing, and the login gate. The KYC and
 * bank pages stay locked until the wallet has a session.
 */

import { renderBankPage } from "./pages/bank";
import { renderKycPage } from "./pages/kyc";
import { renderLoginPage } from "./pages/login";
import { createSession, type Session } from "./session";

export function startApp(root: HTMLElement, session: Session = createSession("")): void {
  root.innerHTML = `
    <header class="topbar">
      <h1>ALBank</h1>
      <nav>
        <a href="#/login">Login</a>
        <a href="#/kyc" data-requires-login>KYC</a>
        <a href="#/bank" data-requires-login>Bank</a>
      </nav>
    </header>
    <main data-role="outlet"></main>
  `;

  const outlet = root.querySelector('[data-role="outlet"]') as HTMLElement;
  const gatedLinks = Array.from(root.querySelectorAll("[data-requires-login]"));

  const updateNav = () => {
    for (const link of gatedLinks) {
      link.classList.toggle("disabled", !session.loggedIn);
      link.setAttribute("aria-disabled", String(!session.loggedIn));
    }
  };

  for (const link of gatedLinks) {
    link.addEventListener("click", (event) => {
      if (!session.loggedIn) event.preventDefault();
    });
  }

  const render = () => {
    const hash = window.location.hash || "#/login";
    const target = hash !== "#/login" && !session.loggedIn ? "#/login" : hash;
    if (target === "#/kyc") renderKycPage(outlet, session);
    else if (target === "#/bank") renderBankPage(outlet, session);
    else {
      renderLoginPage(outlet, session, () => {
        updateNav();
        window.location.hash = "#/bank"; // home page after login
      });
    }
    updateNav();
  };

  window.addEventListener("hashchange", render);
  render();
}
