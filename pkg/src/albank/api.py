"""HTTP surface of the node.

Conventions (frozen; clients depend on them):
  - bodies are JSON; byte values travel hex-encoded; wei amounts travel as
    decimal strings so no client ever routes them through a float
  - authenticated endpoints take `Authorization: Bearer <hex session token>`
    and require the token subject to match the transaction sender
  - every error body is {"message": ...}, possibly with extra keys
  - status mapping: 422 validation, 401 auth, 404 not found, 409 sequence
    conflict (replay)

Write endpoints accept transactions already signed by the client wallet;
the server never holds user keys. A contract-level revert is sealed
on-chain but reported as 422 carrying the revert message and the tx_id.
"""

from __future__ import annotations

import socket

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from albank import chain as chainmod
from albank.bankvm import Receipt, UserRegistrationData
from albank.chain import Operation, Transaction, compute_tx_id
from albank.errors import (
    AlbankError,
    BadSignature,
    DecodeError,
    InvalidAddress,
    InvalidSignature,
    NonceConsumed,
    NoSuchUser,
    NotFound,
    PortInUse,
    StaleSequence,
    TokenInvalid,
    UnknownNonce,
    ValidationFailed,
)
from albank.kycflow import derive_kyc_token, validate_kyc
from albank.node import Node
from albank.wallet import ADDRESS_LEN, SIGBLOB_LEN

DIGEST_LEN = 32


class ApiError(AlbankError):
    def __init__(self, status: int, message: str, **extra):
        super().__init__(message)
        self.status = status
        self.message = message
        self.extra = extra


# -- request parsing helpers ---------------------------------------------------

def _hex_field(body: dict, name: str, length: int | None = None) -> bytes:
    raw = body.get(name)
    if not isinstance(raw, str):
        raise ApiError(422, f"field '{name}' must be a hex string")
    try:
        value = bytes.fromhex(raw)
    except ValueError:
        raise ApiError(422, f"field '{name}' is not valid hex")
    if length is not None and len(value) != length:
        raise ApiError(422, f"field '{name}' must be {length} bytes")
    return value


def _amount_field(body: dict, name: str) -> int:
    """Wei amounts are decimal strings; a plain non-negative int is tolerated."""
    raw = body.get(name)
    if isinstance(raw, int) and not isinstance(raw, bool) and raw >= 0:
        return raw
    if isinstance(raw, str) and raw.isdigit():
        return int(raw)
    raise ApiError(422, f"field '{name}' must be a decimal string of wei")


def _int_field(body: dict, name: str) -> int:
    raw = body.get(name)
    if isinstance(raw, bool) or not isinstance(raw, int) or raw < 0:
        raise ApiError(422, f"field '{name}' must be a non-negative integer")
    return raw


async def _json_body(request: Request) -> dict:
    try:
        body = await request.json()
    except Exception:
        raise ApiError(422, "request body must be JSON")
    if not isinstance(body, dict):
        raise ApiError(422, "request body must be a JSON object")
    return body


def _path_hex(raw: str, name: str, lengths: tuple[int, ...]) -> bytes:
    try:
        value = bytes.fromhex(raw)
    except ValueError:
        raise ApiError(422, f"{name} is not valid hex")
    if len(value) not in lengths:
        want = " or ".join(str(n) for n in lengths)
        raise ApiError(422, f"{name} must be {want} bytes")
    return value


def _parse_tx(body: dict, expected: Operation) -> Transaction:
    obj = body.get("tx")
    if not isinstance(obj, dict):
        raise ApiError(422, "field 'tx' must be a signed transaction object")
    op_name = obj.get("operation")
    if not isinstance(op_name, str) or op_name.upper() not in Operation.__members__:
        raise ApiError(422, "field 'tx.operation' is not a known operation")
    operation = Operation[op_name.upper()]
    if operation != expected:
        raise ApiError(422, f"this endpoint seals {expected.name.lower()} transactions only")
    tx = Transaction(
        sender=_hex_field(obj, "sender", ADDRESS_LEN),
        operation=operation,
        value=_amount_field(obj, "value"),
        payload=_hex_field(obj, "payload"),
        sequence=_int_field(obj, "sequence"),
        signature=_hex_field(obj, "signature", SIGBLOB_LEN),
        tx_id=_hex_field(obj, "tx_id", DIGEST_LEN),
    )
    expected_id = compute_tx_id(
        tx.sender, tx.operation, tx.value, tx.payload, tx.sequence, tx.signature
    )
    if expected_id != tx.tx_id:
        raise ApiError(422, "tx_id does not match the transaction contents")
    return tx


def _parse_record(body: dict) -> UserRegistrationData:
    obj = body.get("record")
    if not isinstance(obj, dict):
        raise ApiError(422, "field 'record' must be an object of registration fields")
    values = {}
    from albank.bankvm import RECORD_FIELDS

    unknown = set(obj) - set(RECORD_FIELDS)
    if unknown:
        raise ApiError(422, f"unknown record fields: {', '.join(sorted(unknown))}")
    for name in RECORD_FIELDS:
        raw = obj.get(name, 0 if name == "annualIncome" else "")
        if name == "annualIncome":
            if isinstance(raw, str) and raw.isdigit():
                raw = int(raw)
            if isinstance(raw, bool) or not isinstance(raw, int) or raw < 0:
                raise ApiError(422, "field 'record.annualIncome' must be a non-negative integer")
        elif not isinstance(raw, str):
            raise ApiError(422, f"field 'record.{name}' must be a string")
        values[name] = raw
    return UserRegistrationData(**values)


# -- response shaping ----------------------------------------------------------

def _event_json(event) -> dict:
    args = []
    for arg in event.args:
        args.append(arg.hex() if isinstance(arg, bytes) else str(arg))
    return {"name": event.name, "args": args}


def _receipt_json(receipt: Receipt, block_height: int) -> dict:
    return {
        "tx_id": receipt.tx_id.hex(),
        "success": receipt.success,
        "block_height": block_height,
        "gas_used": receipt.gas_used,
        "network_fee": str(receipt.network_fee),
        "elapsed_ms": receipt.elapsed_ms,
        "error_message": receipt.error_message,
        "events": [_event_json(e) for e in receipt.events],
    }


_ERROR_STATUS: list[tuple[tuple, int]] = [
    ((TokenInvalid, UnknownNonce, NonceConsumed, BadSignature), 401),
    ((NotFound, NoSuchUser), 404),
    ((StaleSequence,), 409),
    ((DecodeError, InvalidAddress, InvalidSignature, ValidationFailed), 422),
]


def create_app(node: Node) -> FastAPI:
    app = FastAPI(title="albank node", docs_url=None, redoc_url=None, openapi_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse({"message": exc.message, **exc.extra}, status_code=exc.status)

    @app.exception_handler(AlbankError)
    async def _domain_error(request: Request, exc: AlbankError):
        payload = {"message": str(exc)}
        if isinstance(exc, ValidationFailed):
            payload["failures"] = [list(f) for f in exc.report.failures]
        for types, status in _ERROR_STATUS:
            if isinstance(exc, types):
                return JSONResponse(payload, status_code=status)
        return JSONResponse(payload, status_code=500)

    def _auth_subject(request: Request) -> bytes:
        header = request.headers.get("authorization", "")
        scheme, _, rest = header.partition(" ")
        if scheme.lower() != "bearer" or not rest.strip():
            raise ApiError(401, "missing bearer session token")
        try:
            raw = bytes.fromhex(rest.strip())
        except ValueError:
            raise ApiError(401, "session token is not valid hex")
        token = node.auth.check_token_bytes(raw)  # raises TokenInvalid -> 401
        return token.subject

    def _sequence_as(subject: bytes, tx: Transaction, kyc_record=None) -> tuple[Receipt, int]:
        if tx.sender != subject:
            raise ApiError(401, "session subject does not match the transaction sender")
        receipt = node.sequence(tx, kyc_record=kyc_record)
        return receipt, node.chain.head.height

    def _write_response(receipt: Receipt, height: int, **extra) -> JSONResponse:
        body = _receipt_json(receipt, height)
        body.update(extra)
        if not receipt.success:
            # sealed on-chain, still a client error at the HTTP layer
            return JSONResponse({"message": receipt.error_message, **body}, status_code=422)
        return JSONResponse(body)

    # -- auth -------------------------------------------------------------

    @app.post("/auth/challenge")
    async def auth_challenge(request: Request):
        body = await _json_body(request)
        address = _hex_field(body, "address", ADDRESS_LEN)
        nonce = node.auth.issue_nonce(address)
        return {
            "nonce": nonce.value.hex(),
            "issued_at": nonce.issued_at,
            "expires_at": nonce.issued_at + node.auth.nonce_lifetime_ms,
        }

    @app.post("/auth/login")
    async def auth_login(request: Request):
        body = await _json_body(request)
        address = _hex_field(body, "address", ADDRESS_LEN)
        nonce_value = _hex_field(body, "nonce")
        signature = _hex_field(body, "signature", SIGBLOB_LEN)
        token = node.auth.verify_login(address, nonce_value, signature)
        return {
            "token": token.encode().hex(),
            "subject": token.subject.hex(),
            "issued_at": token.issued_at,
            "expires_at": token.expires_at,
        }

    # -- writes -----------------------------------------------------------

    @app.post("/bank/customers")
    async def bank_customers(request: Request):
        subject = _auth_subject(request)
        body = await _json_body(request)
        tx = _parse_tx(body, Operation.ADD_CUSTOMER)
        receipt, height = _sequence_as(subject, tx)
        return _write_response(receipt, height)

    @app.post("/kyc")
    async def kyc_submit(request: Request):
        subject = _auth_subject(request)
        body = await _json_body(request)
        tx = _parse_tx(body, Operation.REGISTER_KYC)
        record = _parse_record(body)
        report = validate_kyc(record)
        if not report.ok:
            raise ValidationFailed(report)
        receipt, height = _sequence_as(subject, tx, kyc_record=record)
        extra = {}
        if receipt.success:
            extra["kyc_token"] = derive_kyc_token(tx.sender, tx.tx_id).hex()
        return _write_response(receipt, height, **extra)

    @app.post("/bank/deposit")
    async def bank_deposit(request: Request):
        subject = _auth_subject(request)
        body = await _json_body(request)
        tx = _parse_tx(body, Operation.DEPOSIT)
        receipt, height = _sequence_as(subject, tx)
        return _write_response(receipt, height)

    @app.post("/bank/withdraw")
    async def bank_withdraw(request: Request):
        subject = _auth_subject(request)
        body = await _json_body(request)
        tx = _parse_tx(body, Operation.WITHDRAW)
        receipt, height = _sequence_as(subject, tx)
        return _write_response(receipt, height)

    # -- views ------------------------------------------------------------

    @app.get("/kyc/{handle}")
    async def kyc_get(handle: str):
        raw = _path_hex(handle, "handle", (ADDRESS_LEN, DIGEST_LEN))
        record, subject, tx_id = node.fetch_kyc(raw)
        return {
            "subject": subject.hex(),
            "tx_id": tx_id.hex() if tx_id else None,
            "kyc_token": derive_kyc_token(subject, tx_id).hex() if tx_id else None,
            "record": record.as_dict(),
        }

    @app.get("/bank/balance/{address}")
    async def bank_balance(address: str):
        raw = _path_hex(address, "address", (ADDRESS_LEN,))
        return {"address": raw.hex(), "balance": str(node.vm.get_balance(raw))}

    @app.get("/account/{address}")
    async def account(address: str):
        raw = _path_hex(address, "address", (ADDRESS_LEN,))
        return {
            "address": raw.hex(),
            "balance": str(node.vm.get_balance(raw)),
            "next_sequence": node.next_sequence(raw),
            "is_customer": raw in node.vm.state.customers,
            "kyc_registered": raw in node.vm.state.users,
        }

    @app.get("/chain/tx/{tx_id}")
    async def chain_tx(tx_id: str):
        raw = _path_hex(tx_id, "tx_id", (DIGEST_LEN,))
        tx, height, pos = chainmod.get_transaction(node.chain, raw)
        block = node.chain.blocks[height]
        return {
            "tx_id": tx.tx_id.hex(),
            "sender": tx.sender.hex(),
            "operation": tx.operation.name.lower(),
            "value": str(tx.value),
            "payload": tx.payload.hex(),
            "sequence": tx.sequence,
            "signature": tx.signature.hex(),
            "block_height": height,
            "position": pos,
            "block_hash": block.block_hash.hex(),
            "timestamp": block.timestamp,
        }

    @app.get("/chain/verify")
    async def chain_verify():
        report = chainmod.verify_chain(node.chain)
        return {
            "valid": report.valid,
            "height": report.height,
            "reason": report.reason,
            "chain_height": node.chain.head.height,
        }

    @app.get("/metrics")
    async def metrics():
        return node.metrics()

    if node.config.static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=node.config.static_dir, html=True), name="ui")

    return app


def serve(node: Node) -> None:
    """Bind and serve until interrupted; raises PortInUse up front."""
    host, port = node.config.listen_host, node.config.listen_port
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        probe.bind((host, port))
    except OSError as exc:
        raise PortInUse(f"{host}:{port} is already bound") from exc
    finally:
        probe.close()

    import uvicorn

    uvicorn.run(create_app(node), host=host, port=port, log_level="warning")
