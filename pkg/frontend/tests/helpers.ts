import type { ApiClient } from "../src/api";
import type { Session } from "../src/session";

/** Poll until the condition holds; throws on timeout so tests fail loudly. */
export async function waitFor(
  condition: () => boolean,
  description = "condition",
  timeoutMs = 5000,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!condition()) {
    if (Date.now() > deadline) throw new Error(`timed out waiting for ${description}`);
    await new Promise((resolve) => setTimeout(resolve, 10));
  }
}

export function freshRoot(): HTMLElement {
  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.appendChild(root);
  return root;
}

/** Session wired to a stub client; pages only see the Session shape. */
export function stubSession(client: Partial<ApiClient>, loggedIn = true): Session {
  window.localStorage.clear();
  return {
    client: client as ApiClient,
    storage: window.localStorage,
    wallet: loggedIn
      ? { privateKey: new Uint8Array(32), publicKey: new Uint8Array(32), address: new Uint8Array(20) }
      : null,
    loggedIn,
  };
}

export function click(el: Element | null): void {
  if (!el) throw new Error("click target not found");
  (el as HTMLElement).click();
}

export function setValue(root: HTMLElement, name: string, value: string): void {
  const el = root.querySelector(`[name="${name}"]`) as HTMLInputElement | HTMLSelectElement | null;
  if (!el) throw new Error(`no field named ${name}`);
  el.value = value;
}
