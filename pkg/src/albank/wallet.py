"""Local wallet and nonce challenge-response login.

Replaces the browser-extension wallet with an Ed25519 keypair held in a
file. Login follows the challenge-response shape: the server issues a
one-time random nonce, the wallet signs it, and the server exchanges a
valid signature for an expiring server-signed session token. No passwords
and no private keys ever reach the server.

Signatures travel as a 96-byte blob: verification key (32) || signature
(64). Addresses are only hashes of verification keys, so the blob carries
the key itself; validity additionally requires the embedded key to hash
back to the claimed sender address.
"""

from __future__ import annotations

import hashlib
import os
import secrets
import threading
from dataclasses import dataclass, field

from cryptography.exceptions import InvalidSignature as _CryptoBadSig
from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from albank.clock import Clock, SystemClock
from albank.encoding import Reader, encode_bytes, encode_u8, encode_u64
from albank.errors import (
    BadSignature,
    DecodeError,
    NonceConsumed,
    TokenInvalid,
    UnknownNonce,
)

ADDRESS_LEN = 20
ZERO_ADDRESS = bytes(ADDRESS_LEN)
NONCE_LEN = 32
SIGBLOB_LEN = 96  # 32-byte verify key + 64-byte signature

WALLET_FILE_VERSION = 1

DEFAULT_NONCE_LIFETIME_MS = 5 * 60 * 1000
DEFAULT_TOKEN_LIFETIME_MS = 60 * 60 * 1000

_NONCE_CONTEXT = b"albank/login-nonce/v1:"
_TOKEN_CONTEXT = b"albank/session-token/v1:"


def derive_address(public_key: bytes) -> bytes:
    """Final 20 bytes of SHA-256 over the raw verification key."""
    return hashlib.sha256(public_key).digest()[-ADDRESS_LEN:]


@dataclass
class Wallet:
    private_key: bytes  # 32-byte Ed25519 seed
    public_key: bytes   # 32-byte verification key
    address: bytes      # 20 bytes, derive_address(public_key)

    def sign(self, message: bytes) -> bytes:
        """Sign and return the 96-byte key||signature blob."""
        key = Ed25519PrivateKey.from_private_bytes(self.private_key)
        return self.public_key + key.sign(message)


def create_wallet(seed: bytes | None = None) -> Wallet:
    """Random wallet, or a deterministic one when a seed is given."""
    if seed is None:
        raw = Ed25519PrivateKey.generate().private_bytes(
            serialization.Encoding.Raw,
            serialization.PrivateFormat.Raw,
            serialization.NoEncryption(),
        )
    else:
        raw = hashlib.sha256(b"albank/wallet-seed/v1:" + seed).digest()
    key = Ed25519PrivateKey.from_private_bytes(raw)
    pub = key.public_key().public_bytes(
        serialization.Encoding.Raw, serialization.PublicFormat.Raw
    )
    return Wallet(private_key=raw, public_key=pub, address=derive_address(pub))


def verify_blob(address: bytes, message: bytes, blob: bytes) -> bool:
    """Check a key||signature blob against a message and sender address."""
    if len(blob) != SIGBLOB_LEN:
        return False
    pub, sig = blob[:32], blob[32:]
    if derive_address(pub) != address:
        return False
    try:
        Ed25519PublicKey.from_public_bytes(pub).verify(sig, message)
    except (_CryptoBadSig, ValueError):
        return False
    return True


def save_wallet(wallet: Wallet, path: str) -> None:
    """Version byte + seed + verify key; file readable by owner only."""
    blob = bytes([WALLET_FILE_VERSION]) + wallet.private_key + wallet.public_key
    fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
    try:
        os.write(fd, blob)
    finally:
        os.close(fd)
    os.chmod(path, 0o600)


def load_wallet(path: str) -> Wallet:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) != 1 + 32 + 32 or blob[0] != WALLET_FILE_VERSION:
        raise DecodeError(f"not a version-{WALLET_FILE_VERSION} wallet file")
    seed, pub = blob[1:33], blob[33:]
    key = Ed25519PrivateKey.from_private_bytes(seed)
    derived = key.public_key().public_bytes(
        serialization.Encoding.Raw, serialization.PublicFormat.Raw
    )
    if derived != pub:
        raise DecodeError("wallet file key mismatch")
    return Wallet(private_key=seed, public_key=pub, address=derive_address(pub))


@dataclass
class Nonce:
    value: bytes
    issued_to: bytes
    issued_at: int
    consumed: bool = False


@dataclass
class SessionToken:
    subject: bytes
    issued_at: int
    expires_at: int
    token_signature: bytes

    def encode(self) -> bytes:
        return (
            encode_u8(1)
            + encode_bytes(self.subject)
            + encode_u64(self.issued_at)
            + encode_u64(self.expires_at)
            + encode_bytes(self.token_signature)
        )

    @classmethod
    def decode(cls, raw: bytes) -> "SessionToken":
        r = Reader(raw)
        if r.u8() != 1:
            raise DecodeError("unknown token version")
        subject = r.bytes_()
        issued_at = r.u64()
        expires_at = r.u64()
        sig = r.bytes_()
        r.expect_end()
        return cls(subject, issued_at, expires_at, sig)


def _token_message(subject: bytes, issued_at: int, expires_at: int) -> bytes:
    return _TOKEN_CONTEXT + encode_bytes(subject) + encode_u64(issued_at) + encode_u64(expires_at)


def sign_nonce(wallet: Wallet, nonce_value: bytes) -> bytes:
    """Fig.-style challenge signature: the wallet signs the raw nonce bytes."""
    return wallet.sign(_NONCE_CONTEXT + nonce_value)


@dataclass
class AuthRegistry:
    """Server-side login state: issued nonces plus the token signing key.

    Safe under concurrent issue/verify; the consumed flip happens under a
    lock, so two racing logins over one nonce yield exactly one token.
    """

    clock: Clock = field(default_factory=SystemClock)
    nonce_lifetime_ms: int = DEFAULT_NONCE_LIFETIME_MS
    token_lifetime_ms: int = DEFAULT_TOKEN_LIFETIME_MS

    def __post_init__(self):
        self._nonces: dict[bytes, Nonce] = {}
        self._lock = threading.Lock()
        self._server_key = Ed25519PrivateKey.generate()
        self._server_pub = self._server_key.public_key()

    def issue_nonce(self, address: bytes) -> Nonce:
        nonce = Nonce(
            value=secrets.token_bytes(NONCE_LEN),
            issued_to=address,
            issued_at=self.clock.now_ms(),
        )
        with self._lock:
            self._nonces[nonce.value] = nonce
        return nonce

    def verify_login(self, address: bytes, nonce_value: bytes, signature: bytes) -> SessionToken:
        """Exchange a signed nonce for a session token; consume on success only.

        Raises UnknownNonce, NonceConsumed, or BadSignature; no state
        changes on any failure path.
        """
        with self._lock:
            nonce = self._nonces.get(nonce_value)
            now = self.clock.now_ms()
            if nonce is None or nonce.issued_to != address:
                raise UnknownNonce("nonce was never issued for this address")
            if now - nonce.issued_at > self.nonce_lifetime_ms:
                raise UnknownNonce("nonce expired")
            if nonce.consumed:
                raise NonceConsumed("nonce already used")
            if not verify_blob(address, _NONCE_CONTEXT + nonce_value, signature):
                raise BadSignature("signature does not verify for this nonce")
            nonce.consumed = True
        return self._issue_token(address, now)

    def _issue_token(self, subject: bytes, now: int) -> SessionToken:
        expires = now + self.token_lifetime_ms
        sig = self._server_key.sign(_token_message(subject, now, expires))
        return SessionToken(subject, now, expires, sig)

    def check_token(self, token: SessionToken) -> bytes:
        """Return the subject address of a valid, unexpired token."""
        try:
            self._server_pub.verify(
                token.token_signature,
                _token_message(token.subject, token.issued_at, token.expires_at),
            )
        except (_CryptoBadSig, ValueError) as exc:
            raise TokenInvalid("token signature does not verify") from exc
        if self.clock.now_ms() >= token.expires_at:
            raise TokenInvalid("token expired")
        if len(token.subject) != ADDRESS_LEN:
            raise TokenInvalid("token subject is not an address")
        return token.subject

    def check_token_bytes(self, raw: bytes) -> SessionToken:
        """Decode + validate an encoded token; returns it."""
        try:
            token = SessionToken.decode(raw)
        except DecodeError as exc:
            raise TokenInvalid(str(exc)) from exc
        self.check_token(token)
        return token
