"""HTTP client for the node API, shared by the CLI and the bench harness.

Transactions are signed locally and shipped as JSON; the session token
rides in the Authorization header. Transport problems surface as
NodeUnreachable, non-2xx responses as ServerError carrying the server's
message verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass

import httpx

from albank.bankvm import UserRegistrationData
from albank.chain import Operation, Transaction, sign_transaction
from albank.encoding import encode_biguint
from albank.errors import AlbankError, NodeUnreachable
from albank.kycflow import build_register_payload
from albank.wallet import Wallet, sign_nonce

DEFAULT_TIMEOUT_S = 30.0


class ServerError(AlbankError):
    """Non-2xx response; message is the server's error body message."""

    def __init__(self, status: int, message: str, body: dict | None = None):
        super().__init__(message)
        self.status = status
        self.message = message
        self.body = body or {}


def tx_json(tx: Transaction) -> dict:
    return {
        "sender": tx.sender.hex(),
        "operation": tx.operation.name.lower(),
        "value": str(tx.value),
        "payload": tx.payload.hex(),
        "sequence": tx.sequence,
        "signature": tx.signature.hex(),
        "tx_id": tx.tx_id.hex(),
    }


@dataclass
class NodeClient:
    endpoint: str
    http: httpx.Client | None = None
    token_hex: str | None = None

    def __post_init__(self):
        if self.http is None:
            self.http = httpx.Client(
                base_url=self.endpoint.rstrip("/"), timeout=DEFAULT_TIMEOUT_S
            )

    def close(self) -> None:
        self.http.close()

    # -- transport ---------------------------------------------------------

    def _request(self, method: str, path: str, json_body: dict | None = None) -> dict:
        headers = {}
        if self.token_hex:
            headers["Authorization"] = f"Bearer {self.token_hex}"
        try:
            resp = self.http.request(method, path, json=json_body, headers=headers)
        except httpx.TransportError as exc:
            raise NodeUnreachable(f"cannot reach {self.endpoint}: {exc}") from exc
        try:
            body = resp.json()
        except ValueError:
            body = {}
        if resp.status_code >= 300:
            message = body.get("message") if isinstance(body, dict) else None
            raise ServerError(resp.status_code, message or f"HTTP {resp.status_code}", body)
        return body

    def get(self, path: str) -> dict:
        return self._request("GET", path)

    def post(self, path: str, json_body: dict) -> dict:
        return self._request("POST", path, json_body)

    # -- auth ----------------------------------------------------------------

    def login(self, wallet: Wallet) -> dict:
        """Challenge-response login; caches the session token on success."""
        challenge = self.post("/auth/challenge", {"address": wallet.address.hex()})
        nonce = bytes.fromhex(challenge["nonce"])
        signature = sign_nonce(wallet, nonce)
        granted = self.post(
            "/auth/login",
            {
                "address": wallet.address.hex(),
                "nonce": nonce.hex(),
                "signature": signature.hex(),
            },
        )
        self.token_hex = granted["token"]
        return granted

    # -- account / views -------------------------------------------------------

    def account(self, address: bytes) -> dict:
        return self.get(f"/account/{address.hex()}")

    def next_sequence(self, address: bytes) -> int:
        return int(self.account(address)["next_sequence"])

    def balance(self, address: bytes) -> int:
        return int(self.get(f"/bank/balance/{address.hex()}")["balance"])

    def get_kyc(self, handle: bytes) -> dict:
        return self.get(f"/kyc/{handle.hex()}")

    def get_tx(self, tx_id: bytes) -> dict:
        return self.get(f"/chain/tx/{tx_id.hex()}")

    def verify_chain(self) -> dict:
        return self.get("/chain/verify")

    def metrics(self) -> dict:
        return self.get("/metrics")

    # -- writes ---------------------------------------------------------------

    def build_tx(
        self, wallet: Wallet, operation: Operation, value: int, payload: bytes
    ) -> Transaction:
        sequence = self.next_sequence(wallet.address)
        return sign_transaction(wallet, operation, value, payload, sequence)

    def add_customer(self, wallet: Wallet) -> dict:
        tx = self.build_tx(wallet, Operation.ADD_CUSTOMER, 0, b"")
        return self.post("/bank/customers", {"tx": tx_json(tx)})

    def submit_kyc(self, wallet: Wallet, data: UserRegistrationData) -> dict:
        """Encrypt, sign, and submit a registration; record travels alongside
        for the node's own validation and store."""
        payload = build_register_payload(wallet, data)
        tx = self.build_tx(wallet, Operation.REGISTER_KYC, 0, payload)
        return self.post("/kyc", {"tx": tx_json(tx), "record": data.as_dict()})

    def deposit(self, wallet: Wallet, amount_wei: int) -> dict:
        tx = self.build_tx(wallet, Operation.DEPOSIT, amount_wei, b"")
        return self.post("/bank/deposit", {"tx": tx_json(tx)})

    def withdraw(self, wallet: Wallet, amount_wei: int) -> dict:
        tx = self.build_tx(wallet, Operation.WITHDRAW, 0, encode_biguint(amount_wei))
        return self.post("/bank/withdraw", {"tx": tx_json(tx)})
