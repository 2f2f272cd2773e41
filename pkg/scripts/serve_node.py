#!/usr/bin/env python3
"""Start a bank node and serve its HTTP API until interrupted.

Equivalent to `albank node serve`; kept as a plain script so a checkout can
run without installing the console entry point.
"""

import argparse

from albank import api
from albank.node import Node, NodeConfig


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8545)
    parser.add_argument("--chain", default="albank.chain", help="ledger file (created on first run)")
    parser.add_argument("--gas-price", type=int, default=10**9, help="wei per gas unit")
    parser.add_argument("--static", default=None, help="serve this directory at /")
    args = parser.parse_args()

    config = NodeConfig(
        listen_host=args.host,
        listen_port=args.port,
        chain_path=args.chain,
        gas_price=args.gas_price,
        static_dir=args.static,
    )
    node = Node(config).start()
    print(f"serving on http://{args.host}:{args.port} (chain: {args.chain})")
    try:
        api.serve(node)
    finally:
        node.shutdown()


if __name__ == "__main__":
    main()
