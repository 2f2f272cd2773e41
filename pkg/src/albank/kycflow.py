"""KYC workflow: validation, approval gate, encrypted submission, tokens.

The registration record travels to the ledger encrypted: the on-chain
payload is an authenticated ciphertext under a key derived from the
submitting wallet's private key, plus a public commitment (digest) to the
record. The node stores the plaintext it received over the authenticated
channel in contract state (so the registry's own required-field checks and
getUser keep working) and can check any stored record against the on-chain
commitment. Nobody without the wallet key can decrypt the ledger payload.

A successful registration yields a KYC token: a digest binding the subject
address to the transaction that recorded the identity. Anyone holding the
pair can recompute and therefore verify the token.
"""

from __future__ import annotations

import hashlib
import re
import secrets
from dataclasses import dataclass

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from albank.bankvm import (
    MSG_ALREADY_REGISTERED,
    REQUIRED_FIELDS,
    UserRegistrationData,
    decode_record,
    encode_record,
)
from albank.chain import Operation, sign_transaction
from albank.encoding import Reader, encode_bytes
from albank.errors import (
    AlreadyRegistered,
    DecodeError,
    DecryptionFailed,
    UserRejected,
    ValidationFailed,
)
from albank.wallet import SessionToken, Wallet

_DATE_SHAPE = re.compile(r"^\d{4}-\d{2}-\d{2}$")

_KEY_INFO = b"albank/kyc-payload-key/v1"
_KEY_TAG_CONTEXT = b"albank/kyc-key-tag/v1:"
_AAD_CONTEXT = b"albank/kyc-payload/v1:"
_TOKEN_CONTEXT = b"albank/kyc-token/v1:"
_COMMIT_CONTEXT = b"albank/kyc-record/v1:"

KEY_TAG_LEN = 16
AEAD_NONCE_LEN = 12

MSG_DOB_SHAPE = "Date of birth must use YYYY-MM-DD format"
MSG_ID_EXPIRY_SHAPE = "ID expiry date must use YYYY-MM-DD format"
MSG_EMAIL_SHAPE = "Email must contain a local part and a domain"
MSG_INCOME_NEGATIVE = "Annual income must be non-negative"


@dataclass
class ValidationReport:
    ok: bool
    failures: list[tuple[str, str]]


@dataclass(frozen=True)
class KycToken:
    token: bytes
    subject: bytes
    tx_id: bytes


@dataclass(frozen=True)
class EncryptedKycPayload:
    ciphertext: bytes
    nonce: bytes
    key_tag: bytes


def validate_kyc(data: UserRegistrationData) -> ValidationReport:
    """Pure completeness/shape check; lists every violated rule."""
    failures: list[tuple[str, str]] = []
    for name, message in REQUIRED_FIELDS:
        if not getattr(data, name):
            failures.append((name, message))
    if data.dob and not _DATE_SHAPE.match(data.dob):
        failures.append(("dob", MSG_DOB_SHAPE))
    if data.idExpiry and not _DATE_SHAPE.match(data.idExpiry):
        failures.append(("idExpiry", MSG_ID_EXPIRY_SHAPE))
    if data.email:
        local, _, domain = data.email.partition("@")
        if not local or not domain:
            failures.append(("email", MSG_EMAIL_SHAPE))
    if data.annualIncome < 0:
        failures.append(("annualIncome", MSG_INCOME_NEGATIVE))
    return ValidationReport(ok=not failures, failures=failures)


# -- encryption ---------------------------------------------------------------

def _payload_key(wallet: Wallet) -> bytes:
    return HKDF(
        algorithm=hashes.SHA256(), length=32, salt=None, info=_KEY_INFO
    ).derive(wallet.private_key)


def key_tag_for(wallet: Wallet) -> bytes:
    return hashlib.sha256(_KEY_TAG_CONTEXT + wallet.public_key).digest()[:KEY_TAG_LEN]


def encrypt_payload(wallet: Wallet, data: UserRegistrationData) -> EncryptedKycPayload:
    nonce = secrets.token_bytes(AEAD_NONCE_LEN)
    aead = ChaCha20Poly1305(_payload_key(wallet))
    ciphertext = aead.encrypt(nonce, encode_record(data), _AAD_CONTEXT + wallet.address)
    return EncryptedKycPayload(ciphertext, nonce, key_tag_for(wallet))


def decrypt_payload(wallet: Wallet, payload: EncryptedKycPayload) -> UserRegistrationData:
    if payload.key_tag != key_tag_for(wallet):
        raise DecryptionFailed("payload was not encrypted under this wallet's key")
    aead = ChaCha20Poly1305(_payload_key(wallet))
    try:
        raw = aead.decrypt(payload.nonce, payload.ciphertext, _AAD_CONTEXT + wallet.address)
    except InvalidTag as exc:
        raise DecryptionFailed("ciphertext authentication failed") from exc
    try:
        return decode_record(raw)
    except DecodeError as exc:
        raise DecryptionFailed(f"decrypted bytes do not decode: {exc}") from exc


# -- tokens and commitments ---------------------------------------------------

def derive_kyc_token(subject: bytes, tx_id: bytes) -> bytes:
    return hashlib.sha256(_TOKEN_CONTEXT + subject + tx_id).digest()


def record_commitment(data: UserRegistrationData) -> bytes:
    return hashlib.sha256(_COMMIT_CONTEXT + encode_record(data)).digest()


# -- on-ledger payload wire format (frozen) -----------------------------------
#
# register payload = bytes(ciphertext) | bytes(nonce) | bytes(key_tag)
#                    | record commitment (32 raw)

def build_register_payload(wallet: Wallet, data: UserRegistrationData) -> bytes:
    enc = encrypt_payload(wallet, data)
    return (
        encode_bytes(enc.ciphertext)
        + encode_bytes(enc.nonce)
        + encode_bytes(enc.key_tag)
        + record_commitment(data)
    )


def parse_register_payload(payload: bytes) -> tuple[EncryptedKycPayload, bytes]:
    r = Reader(payload)
    ciphertext = r.bytes_()
    nonce = r.bytes_()
    key_tag = r.bytes_()
    commitment = r.take(32)
    r.expect_end()
    return EncryptedKycPayload(ciphertext, nonce, key_tag), commitment


# -- orchestration ------------------------------------------------------------

def submit_kyc(
    node,
    wallet: Wallet,
    session: SessionToken,
    data: UserRegistrationData,
    approval: bool,
) -> KycToken:
    """Run the whole submission flow against an in-process node.

    Validation failures and a user rejection end the flow with no
    transaction; an approved, valid record is encrypted, signed,
    sequenced, and exchanged for a KYC token.
    """
    subject = node.auth.check_token(session)
    if subject != wallet.address:
        raise ValidationFailed(ValidationReport(False, [("session", "session does not match wallet")]))
    report = validate_kyc(data)
    if not report.ok:
        raise ValidationFailed(report)
    if not approval:
        raise UserRejected("user rejected the transaction")

    payload = build_register_payload(wallet, data)
    tx = sign_transaction(
        wallet, Operation.REGISTER_KYC, 0, payload, node.next_sequence(wallet.address)
    )
    receipt = node.sequence(tx, kyc_record=data)
    if not receipt.success:
        if receipt.error_message == MSG_ALREADY_REGISTERED:
            raise AlreadyRegistered(receipt.error_message)
        raise ValidationFailed(ValidationReport(False, [("record", receipt.error_message or "")]))
    return KycToken(derive_kyc_token(wallet.address, tx.tx_id), wallet.address, tx.tx_id)
