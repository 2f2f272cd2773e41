/**
 * Exact ETH/wei conversion. Amounts are BigInt end to end; decimal text is
 * parsed with scaled integer arithmetic and never passes through a float.
 */

export const WEI_PER_ETH = 10n ** 18n;
const ETH_DECIMALS = 18;

const DIGITS = /^[0-9]+$/;

/** Parse a decimal ETH string ("1", "0.25", ".5") into wei, exactly. */
export function ethToWei(text: string): bigint {
  const cleaned = text.trim();
  if (cleaned.startsWith("-")) throw new Error("amount must not be negative");
  const dot = cleaned.indexOf(".");
  const whole = dot < 0 ? cleaned : cleaned.slice(0, dot);
  const frac = dot < 0 ? "" : cleaned.slice(dot + 1);
  if (!whole && !frac) throw new Error(`not a decimal amount: ${JSON.stringify(text)}`);
  if ((whole && !DIGITS.test(whole)) || (frac && !DIGITS.test(frac))) {
    throw new Error(`not a decimal amount: ${JSON.stringify(text)}`);
  }
  if (frac.length > ETH_DECIMALS) {
    throw new Error("ETH amounts carry at most 18 decimal places");
  }
  let wei = BigInt(whole || "0") * WEI_PER_ETH;
  if (frac) wei += BigInt(frac.padEnd(ETH_DECIMALS, "0"));
  return wei;
}

/** Render wei as an exact decimal ETH string, no trailing zeros. */
export function weiToEthStr(wei: bigint): string {
  if (wei < 0n) throw new Error("amount must not be negative");
  const whole = wei / WEI_PER_ETH;
  const rem = wei % WEI_PER_ETH;
  if (rem === 0n) return whole.toString();
  const frac = rem.toString().padStart(ETH_DECIMALS, "0").replace(/0+$/, "");
  return `${whole}.${frac}`;
}
