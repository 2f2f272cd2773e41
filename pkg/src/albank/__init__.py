"""Desk-scale decentralized bank node: hash-linked ledger, deterministic
bank/KYC contract VM with gas metering, wallet challenge-response auth,
an HTTP API, a CLI, and a measurement harness."""

__version__ = "0.1.0"
