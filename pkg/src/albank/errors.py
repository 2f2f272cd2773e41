"""Exception taxonomy shared across the node."""

from __future__ import annotations


class AlbankError(Exception):
    """Base class for every error this package raises on purpose."""


class DecodeError(AlbankError):
    """Byte stream does not parse under the canonical encoding."""


# -- chain ------------------------------------------------------------------

class InvalidSignature(AlbankError):
    """Transaction signature does not verify against the sender."""


class StaleSequence(AlbankError):
    """Replayed or out-of-order per-sender sequence number."""


class NotFound(AlbankError):
    """Lookup by id/handle matched nothing."""


class CorruptFile(AlbankError):
    """Persisted chain file fails framing or integrity verification."""


# -- wallet / auth ----------------------------------------------------------

class UnknownNonce(AlbankError):
    """Nonce was never issued, was issued to another address, or expired."""


class NonceConsumed(AlbankError):
    """Nonce already used for a login (replay)."""


class BadSignature(AlbankError):
    """Login signature does not verify."""


class TokenInvalid(AlbankError):
    """Session token is malformed, forged, or expired."""


# -- bankvm (view calls raise; write failures travel inside receipts) -------

class InvalidAddress(AlbankError):
    """Zero address passed where a real address is required."""


class NoSuchUser(AlbankError):
    """No KYC record stored for the queried address."""


class UnknownOperation(AlbankError):
    """Transaction operation tag does not map to a contract function."""


# -- kycflow ----------------------------------------------------------------

class ValidationFailed(AlbankError):
    """KYC record failed validation; carries the report."""

    def __init__(self, report):
        self.report = report
        first = report.failures[0][1] if report.failures else "validation failed"
        super().__init__(first)


class UserRejected(AlbankError):
    """User declined the transaction approval step; flow ends."""


class AlreadyRegistered(AlbankError):
    """Wallet already holds a KYC record on the ledger."""


class DecryptionFailed(AlbankError):
    """Wrong key or tampered ciphertext."""


# -- node -------------------------------------------------------------------

class PortInUse(AlbankError):
    """Configured listen address is already bound."""


class NodeUnreachable(AlbankError):
    """Bench harness could not reach the node endpoint."""


class SetupFailed(AlbankError):
    """Bench harness could not prepare wallets/sessions."""


# The node-level name for a chain file that fails verification on startup.
CorruptChainFile = CorruptFile
