"""Exact ETH/wei conversions.

Monetary text never passes through binary floating point: ETH decimals
are parsed with scaled integer arithmetic at 1 ETH = 10^18 wei.
"""

from __future__ import annotations

WEI_PER_ETH = 10**18
_ETH_DECIMALS = 18


def eth_to_wei(text: str) -> int:
    """Parse a decimal ETH string ("1", "0.25", ".5") into wei, exactly."""
    text = text.strip()
    if text.startswith("-"):
        raise ValueError("amount must not be negative")
    whole, dot, frac = text.partition(".")
    if not whole and not frac:
        raise ValueError(f"not a decimal amount: {text!r}")
    if (whole and not whole.isdigit()) or (frac and not frac.isdigit()):
        raise ValueError(f"not a decimal amount: {text!r}")
    if len(frac) > _ETH_DECIMALS:
        raise ValueError("ETH amounts carry at most 18 decimal places")
    wei = int(whole or "0") * WEI_PER_ETH
    if frac:
        wei += int(frac.ljust(_ETH_DECIMALS, "0"))
    return wei


def wei_to_eth_str(wei: int) -> str:
    """Render wei as an exact decimal ETH string, no trailing zeros."""
    if wei < 0:
        raise ValueError("amount must not be negative")
    whole, rem = divmod(wei, WEI_PER_ETH)
    if rem == 0:
        return str(whole)
    frac = str(rem).rjust(_ETH_DECIMALS, "0").rstrip("0")
    return f"{whole}.{frac}"


def parse_amount(text: str) -> int:
    """Parse "25wei", "1eth", "0.5 eth", or bare digits (wei) into wei."""
    cleaned = text.strip().lower()
    for suffix in ("wei", "eth"):
        if cleaned.endswith(suffix):
            number = cleaned[: -len(suffix)].strip()
            if suffix == "wei":
                if not number.isdigit():
                    raise ValueError(f"wei amounts must be whole numbers: {text!r}")
                return int(number)
            return eth_to_wei(number)
    if cleaned.isdigit():
        return int(cleaned)
    raise ValueError(f"cannot parse amount {text!r}; use e.g. 25wei or 0.5eth")
