"""The running service: single-authority sequencer binding the contract VM
to the ledger, plus persistence lifecycle.

All writes funnel through one lock (strict serialization); a write is
validated, executed by the VM, and sealed into its own block, which is
appended to the chain file and synced before the receipt goes back. A
contract-level failure (revert) is still sealed, with success == false, so
fee accounting of failures stays observable. Garbage that fails intrinsic
validity (bad signature, stale sequence, undecodable payload) never
reaches a block.

Restart replays the persisted chain through a fresh VM. Registration
plaintext cannot be recovered from the ledger (payloads are encrypted
under wallet-derived keys), so the node keeps a private sidecar store of
submitted records, each bound to the on-chain record commitment; replay
feeds the stored record back through the VM and re-checks the binding.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, field

from albank import chain as chainmod
from albank.bankvm import BankVM, Receipt, UserRegistrationData, encode_record
from albank.chain import Chain, Operation, Transaction, verify_transaction
from albank.clock import Clock, FixedClock, SystemClock
from albank.encoding import Reader, encode_bytes, encode_u32, encode_u8
from albank.errors import (
    CorruptFile,
    InvalidAddress,
    InvalidSignature,
    NotFound,
    StaleSequence,
)
from albank.errors import DecodeError
from albank.kycflow import derive_kyc_token, parse_register_payload, record_commitment
from albank.wallet import ADDRESS_LEN, AuthRegistry, ZERO_ADDRESS

KYC_STORE_MAGIC = b"ALKYC"
KYC_STORE_VERSION = 1


@dataclass
class NodeConfig:
    listen_host: str = "127.0.0.1"
    listen_port: int = 8545
    chain_path: str = "albank.chain"
    gas_price: int = 10**9  # wei per gas unit
    token_lifetime_s: int = 3600
    nonce_lifetime_s: int = 300
    clock_source: str = "real"  # "real" | "fixed"
    static_dir: str | None = None

    def __post_init__(self):
        if self.gas_price <= 0:
            raise ValueError("gas_price must be positive")
        if self.token_lifetime_s <= 0 or self.nonce_lifetime_s <= 0:
            raise ValueError("lifetimes must be positive")

    @property
    def kyc_store_path(self) -> str:
        return self.chain_path + ".kyc"

    def make_clock(self) -> Clock:
        return FixedClock() if self.clock_source == "fixed" else SystemClock()


# -- KYC sidecar store --------------------------------------------------------

def _store_header() -> bytes:
    return KYC_STORE_MAGIC + encode_u8(KYC_STORE_VERSION)


def append_kyc_record(path: str, tx_id: bytes, data: UserRegistrationData) -> None:
    rec = tx_id + encode_bytes(encode_record(data))
    exists = os.path.exists(path)
    with open(path, "ab") as fh:
        if not exists:
            fh.write(_store_header())
        fh.write(encode_u32(len(rec)) + rec)
        fh.flush()
        os.fsync(fh.fileno())


def load_kyc_store(path: str) -> dict[bytes, UserRegistrationData]:
    """Read the sidecar; a trailing partial record (crash mid-write) is
    dropped, anything else malformed is corruption."""
    from albank.bankvm import decode_record

    if not os.path.exists(path):
        return {}
    with open(path, "rb") as fh:
        data = fh.read()
    header = _store_header()
    if not data.startswith(header):
        raise CorruptFile("bad kyc store header")
    records: dict[bytes, UserRegistrationData] = {}
    pos = len(header)
    while pos < len(data):
        if pos + 4 > len(data):
            break  # partial length prefix from an interrupted append
        rec_len = int.from_bytes(data[pos : pos + 4], "big")
        if pos + 4 + rec_len > len(data):
            break  # partial record from an interrupted append
        rec = data[pos + 4 : pos + 4 + rec_len]
        pos += 4 + rec_len
        if len(rec) < 32:
            raise CorruptFile("kyc store record too short")
        r = Reader(rec[32:])
        try:
            record = decode_record(r.bytes_())
            r.expect_end()
        except DecodeError as exc:
            raise CorruptFile(f"undecodable kyc store record: {exc}") from exc
        records[rec[:32]] = record
    return records


class Node:
    """Wires AuthRegistry + BankVM + Chain behind one sequencer lock."""

    def __init__(self, config: NodeConfig):
        self.config = config
        self.clock = config.make_clock()
        self.auth = AuthRegistry(
            clock=self.clock,
            nonce_lifetime_ms=config.nonce_lifetime_s * 1000,
            token_lifetime_ms=config.token_lifetime_s * 1000,
        )
        self.vm = BankVM(gas_price=config.gas_price)
        self.chain: Chain = Chain(clock=self.clock)
        self.kyc_records: dict[bytes, UserRegistrationData] = {}
        self.kyc_tokens: dict[bytes, tuple[bytes, bytes]] = {}
        self._lock = threading.Lock()
        self._started = False
        self._started_at_ms = 0
        self.op_counts: dict[str, int] = {}
        self.gas_used_total = 0

    # -- lifecycle ----------------------------------------------------------

    def start(self) -> "Node":
        """Fresh start writes a genesis file; resume loads, verifies, and
        replays the chain into a fresh VM."""
        if os.path.exists(self.config.chain_path):
            self.chain = chainmod.load(self.config.chain_path, clock=self.clock)
            self.kyc_records = load_kyc_store(self.config.kyc_store_path)
            self._replay()
        else:
            self.chain = chainmod.genesis(self.clock)
            chainmod.save(self.chain, self.config.chain_path)
            self.kyc_records = {}
        self._started = True
        self._started_at_ms = self.clock.now_ms()
        return self

    def shutdown(self) -> None:
        """Blocks are synced as they seal; shutdown re-verifies and stops."""
        with self._lock:
            report = chainmod.verify_chain(self.chain)
            if not report.valid:
                raise CorruptFile(
                    f"chain invalid at shutdown: height {report.height} {report.reason}"
                )
            self._started = False

    def _replay(self) -> None:
        self.vm = BankVM(gas_price=self.config.gas_price)
        self.kyc_tokens = {}
        for block in self.chain.blocks:
            for tx in block.tx_list:
                record = None
                if tx.operation == Operation.REGISTER_KYC:
                    record = self.kyc_records.get(tx.tx_id)
                    if record is None:
                        raise CorruptFile(
                            f"kyc store is missing the record for sealed tx {tx.tx_id.hex()}"
                        )
                    _, commitment = parse_register_payload(tx.payload)
                    if record_commitment(record) != commitment:
                        raise CorruptFile(
                            f"kyc store record does not match on-chain commitment for {tx.tx_id.hex()}"
                        )
                receipt = self.vm.execute(tx, kyc_record=record)
                self._note(tx, receipt)

    def _note(self, tx: Transaction, receipt: Receipt) -> None:
        self.op_counts[tx.operation.name] = self.op_counts.get(tx.operation.name, 0) + 1
        self.gas_used_total += receipt.gas_used
        if receipt.success and tx.operation == Operation.REGISTER_KYC:
            token = derive_kyc_token(tx.sender, tx.tx_id)
            self.kyc_tokens[token] = (tx.sender, tx.tx_id)

    # -- sequencing -----------------------------------------------------------

    def next_sequence(self, address: bytes) -> int:
        return self.chain.last_sequence.get(address, 0) + 1

    def sequence(self, tx: Transaction, kyc_record: UserRegistrationData | None = None) -> Receipt:
        """Validate, execute, seal, persist; returns the receipt.

        Raises InvalidSignature / StaleSequence / DecodeError without
        touching chain or state.
        """
        with self._lock:
            if not verify_transaction(tx):
                raise InvalidSignature(f"transaction {tx.tx_id.hex()} does not verify")
            last = self.chain.last_sequence.get(tx.sender, 0)
            if tx.sequence <= last:
                raise StaleSequence(
                    f"sequence {tx.sequence} for {tx.sender.hex()} is not above {last}"
                )
            if tx.operation == Operation.REGISTER_KYC:
                if kyc_record is None:
                    raise DecodeError("register-kyc requires the plaintext record")
                _, commitment = parse_register_payload(tx.payload)
                if record_commitment(kyc_record) != commitment:
                    raise DecodeError("record does not match the payload commitment")

            receipt = self.vm.execute(tx, kyc_record=kyc_record)

            if tx.operation == Operation.REGISTER_KYC:
                # write-ahead: the sidecar record lands before the block so a
                # crash can orphan a record but never a block
                append_kyc_record(self.config.kyc_store_path, tx.tx_id, kyc_record)
                self.kyc_records[tx.tx_id] = kyc_record
            block = chainmod.append_block(self.chain, [tx])
            chainmod.append_block_record(self.config.chain_path, block)
            self._note(tx, receipt)
            return receipt

    # -- lookups --------------------------------------------------------------

    def resolve_kyc_handle(self, handle: bytes) -> tuple[bytes, bytes | None]:
        """Map a KYC token digest, transaction id, or address to
        (subject address, tx_id or None)."""
        if len(handle) == ADDRESS_LEN:
            if handle == ZERO_ADDRESS:
                raise InvalidAddress("Invalid address")
            return handle, None
        if len(handle) == 32:
            hit = self.kyc_tokens.get(handle)
            if hit is not None:
                return hit
            if handle in self.chain.tx_index:
                tx, _, _ = chainmod.get_transaction(self.chain, handle)
                if tx.operation == Operation.REGISTER_KYC:
                    return tx.sender, tx.tx_id
            raise NotFound(f"no KYC entry for handle {handle.hex()}")
        raise NotFound("handle must be an address, transaction id, or KYC token")

    def fetch_kyc(self, handle: bytes) -> tuple[UserRegistrationData, bytes, bytes | None]:
        """Return (record, subject, tx_id or None) for any resolvable handle."""
        subject, tx_id = self.resolve_kyc_handle(handle)
        record = self.vm.get_user(subject)  # raises NoSuchUser / InvalidAddress
        if tx_id is None:
            for token, (subj, tid) in self.kyc_tokens.items():
                if subj == subject:
                    tx_id = tid
                    break
        return record, subject, tx_id

    def metrics(self) -> dict:
        return {
            "chain_height": self.chain.head.height,
            "tx_count": len(self.chain.tx_index),
            "op_counts": dict(self.op_counts),
            "gas_used_total": self.gas_used_total,
            "gas_price": str(self.config.gas_price),
            "pool": str(self.vm.state.pool),
            "uptime_ms": self.clock.now_ms() - self._started_at_ms if self._started else 0,
        }
