#!/usr/bin/env python3
"""Measure the six public bank functions against a running node.

Prints per-function means and optionally writes the full sample table.
"""

import argparse
import sys

from albank import bench
from albank.client import NodeClient
from albank.errors import AlbankError, NodeUnreachable
from albank.units import wei_to_eth_str


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--endpoint", default="http://127.0.0.1:8545")
    parser.add_argument("--samples", type=int, default=bench.DEFAULT_SAMPLES)
    parser.add_argument("--out", default=None, help="write all rows to this file")
    parser.add_argument("--format", choices=["csv", "long"], default="csv")
    args = parser.parse_args()

    client = NodeClient(args.endpoint)
    try:
        rows = bench.run_suite(client, samples=args.samples)
    except NodeUnreachable as exc:
        sys.exit(f"error: {exc}")
    except AlbankError as exc:
        sys.exit(f"error: {exc}")

    means = bench.summarize(rows)
    width = max(len(fn) for fn in means)
    print(f"{args.samples} samples per function")
    for fn, params in means.items():
        print(
            f"{fn:<{width}}  {params[bench.PARAM_SPEED]:8.2f} ms"
            f"  {params[bench.PARAM_GAS]:>10.1f} gas"
            f"  {wei_to_eth_str(int(params[bench.PARAM_FEE]))} ETH"
        )
    if args.out:
        bench.export(rows, args.out, args.format)
        print(f"rows written to {args.out}")


if __name__ == "__main__":
    main()
