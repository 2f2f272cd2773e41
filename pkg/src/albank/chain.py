"""Append-only hash-linked ledger of signed transactions.

One block commits to its predecessor by hash, so any byte of accepted
history that participates in a digest is tamper-evident. The module never
mutates an existing block; the only state-changing operation is appending
a new head.

Replay defense: each sender carries a strictly increasing sequence
counter; re-submitting an accepted signed transaction is rejected without
touching the chain.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from enum import IntEnum

from albank.clock import Clock, SystemClock
from albank.encoding import (
    Reader,
    encode_bytes,
    encode_u8,
    encode_u32,
    encode_u64,
    encode_biguint,
)
from albank.errors import CorruptFile, DecodeError, InvalidSignature, NotFound, StaleSequence
from albank.wallet import ADDRESS_LEN, SIGBLOB_LEN, Wallet, verify_blob

DIGEST_LEN = 32
ZERO_DIGEST = bytes(DIGEST_LEN)

CHAIN_FILE_MAGIC = b"ALBANK"
CHAIN_FILE_VERSION = 1

_TX_SIGN_CONTEXT = b"albank/tx/v1:"
_TX_ID_CONTEXT = b"albank/txid/v1:"
_BLOCK_HASH_CONTEXT = b"albank/block/v1:"


class Operation(IntEnum):
    ADD_CUSTOMER = 1
    REGISTER_KYC = 2
    DEPOSIT = 3
    WITHDRAW = 4


@dataclass(frozen=True)
class Transaction:
    sender: bytes
    operation: Operation
    value: int
    payload: bytes
    sequence: int
    signature: bytes  # 96-byte verify-key || signature blob
    tx_id: bytes

    def sign_bytes(self) -> bytes:
        return transaction_sign_bytes(
            self.sender, self.operation, self.value, self.payload, self.sequence
        )


def transaction_sign_bytes(
    sender: bytes, operation: Operation, value: int, payload: bytes, sequence: int
) -> bytes:
    if len(sender) != ADDRESS_LEN:
        raise ValueError("sender must be a 20-byte address")
    return (
        _TX_SIGN_CONTEXT
        + sender
        + encode_u8(int(operation))
        + encode_biguint(value)
        + encode_bytes(payload)
        + encode_u64(sequence)
    )


def compute_tx_id(
    sender: bytes, operation: Operation, value: int, payload: bytes, sequence: int, signature: bytes
) -> bytes:
    body = (
        _TX_ID_CONTEXT
        + sender
        + encode_u8(int(operation))
        + encode_biguint(value)
        + encode_bytes(payload)
        + encode_u64(sequence)
        + encode_bytes(signature)
    )
    return hashlib.sha256(body).digest()


def sign_transaction(
    wallet: Wallet, operation: Operation, value: int, payload: bytes, sequence: int
) -> Transaction:
    """Client-side constructor: sign, derive the id, freeze the transaction."""
    sig = wallet.sign(transaction_sign_bytes(wallet.address, operation, value, payload, sequence))
    tx_id = compute_tx_id(wallet.address, operation, value, payload, sequence, sig)
    return Transaction(wallet.address, operation, value, payload, sequence, sig, tx_id)


def verify_transaction(tx: Transaction) -> bool:
    """Signature verifies under the embedded key and the key owns the sender
    address; the stored id matches the digest of everything else."""
    if len(tx.signature) != SIGBLOB_LEN:
        return False
    if not verify_blob(tx.sender, tx.sign_bytes(), tx.signature):
        return False
    expected = compute_tx_id(
        tx.sender, tx.operation, tx.value, tx.payload, tx.sequence, tx.signature
    )
    return expected == tx.tx_id


def encode_transaction(tx: Transaction) -> bytes:
    return (
        tx.sender
        + encode_u8(int(tx.operation))
        + encode_biguint(tx.value)
        + encode_bytes(tx.payload)
        + encode_u64(tx.sequence)
        + encode_bytes(tx.signature)
        + tx.tx_id
    )


def decode_transaction(r: Reader) -> Transaction:
    sender = r.take(ADDRESS_LEN)
    op_raw = r.u8()
    try:
        operation = Operation(op_raw)
    except ValueError as exc:
        raise DecodeError(f"unknown operation tag {op_raw}") from exc
    value = r.biguint()
    payload = r.bytes_()
    sequence = r.u64()
    signature = r.bytes_()
    tx_id = r.take(DIGEST_LEN)
    return Transaction(sender, operation, value, payload, sequence, signature, tx_id)


@dataclass(frozen=True)
class Block:
    height: int
    prev_hash: bytes
    tx_list: tuple[Transaction, ...]
    timestamp: int
    block_hash: bytes


def compute_block_hash(
    height: int, prev_hash: bytes, tx_ids: list[bytes], timestamp: int
) -> bytes:
    body = (
        _BLOCK_HASH_CONTEXT
        + encode_u64(height)
        + prev_hash
        + encode_u64(timestamp)
        + encode_u32(len(tx_ids))
        + b"".join(tx_ids)
    )
    return hashlib.sha256(body).digest()


def encode_block(block: Block) -> bytes:
    out = (
        encode_u64(block.height)
        + block.prev_hash
        + encode_u64(block.timestamp)
        + block.block_hash
        + encode_u32(len(block.tx_list))
    )
    for tx in block.tx_list:
        out += encode_transaction(tx)
    return out


def decode_block(raw: bytes) -> Block:
    r = Reader(raw)
    height = r.u64()
    prev_hash = r.take(DIGEST_LEN)
    timestamp = r.u64()
    block_hash = r.take(DIGEST_LEN)
    count = r.u32()
    txs = tuple(decode_transaction(r) for _ in range(count))
    r.expect_end()
    return Block(height, prev_hash, txs, timestamp, block_hash)


@dataclass
class IntegrityReport:
    valid: bool
    height: int | None = None
    reason: str | None = None


@dataclass
class Chain:
    blocks: list[Block] = field(default_factory=list)
    tx_index: dict[bytes, tuple[int, int]] = field(default_factory=dict)
    clock: Clock = field(default_factory=SystemClock)
    # last accepted sequence per sender, derived from history
    last_sequence: dict[bytes, int] = field(default_factory=dict)

    @property
    def head(self) -> Block:
        return self.blocks[-1]

    def __len__(self) -> int:
        return len(self.blocks)


def genesis(clock: Clock | None = None) -> Chain:
    clock = clock or SystemClock()
    ts = clock.now_ms()
    block = Block(
        height=0,
        prev_hash=ZERO_DIGEST,
        tx_list=(),
        timestamp=ts,
        block_hash=compute_block_hash(0, ZERO_DIGEST, [], ts),
    )
    return Chain(blocks=[block], clock=clock)


def append_block(chain: Chain, tx_list: list[Transaction]) -> Block:
    """Seal tx_list into a new head block.

    Every signature must verify and every per-sender sequence must strictly
    exceed the last accepted value; nothing is appended otherwise.
    """
    pending: dict[bytes, int] = {}
    for tx in tx_list:
        if not verify_transaction(tx):
            raise InvalidSignature(f"transaction {tx.tx_id.hex()} does not verify")
        last = pending.get(tx.sender, chain.last_sequence.get(tx.sender, 0))
        if tx.sequence <= last:
            raise StaleSequence(
                f"sequence {tx.sequence} for {tx.sender.hex()} is not above {last}"
            )
        pending[tx.sender] = tx.sequence

    prev = chain.head
    height = prev.height + 1
    ts = chain.clock.now_ms()
    tx_ids = [tx.tx_id for tx in tx_list]
    block = Block(
        height=height,
        prev_hash=prev.block_hash,
        tx_list=tuple(tx_list),
        timestamp=ts,
        block_hash=compute_block_hash(height, prev.block_hash, tx_ids, ts),
    )
    chain.blocks.append(block)
    for pos, tx in enumerate(block.tx_list):
        chain.tx_index[tx.tx_id] = (height, pos)
    chain.last_sequence.update(pending)
    return block


def verify_chain(chain: Chain) -> IntegrityReport:
    """Walk the whole chain; report the first violated integrity check.

    Violations are report content, not exceptions.
    """
    for i, block in enumerate(chain.blocks):
        if block.height != i:
            return IntegrityReport(False, i, "height-mismatch")
        for tx in block.tx_list:
            recomputed = compute_tx_id(
                tx.sender, tx.operation, tx.value, tx.payload, tx.sequence, tx.signature
            )
            if recomputed != tx.tx_id:
                return IntegrityReport(False, i, "hash-mismatch")
        expected = compute_block_hash(
            block.height, block.prev_hash, [tx.tx_id for tx in block.tx_list], block.timestamp
        )
        if expected != block.block_hash:
            return IntegrityReport(False, i, "hash-mismatch")
        for tx in block.tx_list:
            if not verify_blob(tx.sender, tx.sign_bytes(), tx.signature):
                return IntegrityReport(False, i, "bad-signature")
        if i == 0:
            if block.prev_hash != ZERO_DIGEST:
                return IntegrityReport(False, 0, "link-mismatch")
        elif block.prev_hash != chain.blocks[i - 1].block_hash:
            return IntegrityReport(False, i, "link-mismatch")
    return IntegrityReport(True)


def get_transaction(chain: Chain, tx_id: bytes) -> tuple[Transaction, int, int]:
    """Return (transaction, height, position) or raise NotFound."""
    loc = chain.tx_index.get(tx_id)
    if loc is None:
        raise NotFound(f"no transaction {tx_id.hex()}")
    height, pos = loc
    return chain.blocks[height].tx_list[pos], height, pos


# -- persistence (format version 1, frozen) ----------------------------------
#
# file = MAGIC(6) | version u8 | genesis block_hash (32)
#        then per block: u32 record length | encoded block record

def file_header(chain: Chain) -> bytes:
    return CHAIN_FILE_MAGIC + encode_u8(CHAIN_FILE_VERSION) + chain.blocks[0].block_hash


def save(chain: Chain, path: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(file_header(chain))
        for block in chain.blocks:
            raw = encode_block(block)
            fh.write(encode_u32(len(raw)) + raw)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def append_block_record(path: str, block: Block) -> None:
    """Append one sealed block to an existing chain file and sync it."""
    raw = encode_block(block)
    with open(path, "ab") as fh:
        fh.write(encode_u32(len(raw)) + raw)
        fh.flush()
        os.fsync(fh.fileno())


def load(path: str, clock: Clock | None = None) -> Chain:
    """Read, decode, and re-verify a chain file; refuse anything invalid."""
    with open(path, "rb") as fh:
        data = fh.read()

    header_len = len(CHAIN_FILE_MAGIC) + 1 + DIGEST_LEN
    if len(data) < header_len:
        raise CorruptFile("file shorter than header")
    if data[: len(CHAIN_FILE_MAGIC)] != CHAIN_FILE_MAGIC:
        raise CorruptFile("bad magic")
    if data[len(CHAIN_FILE_MAGIC)] != CHAIN_FILE_VERSION:
        raise CorruptFile(f"unsupported format version {data[len(CHAIN_FILE_MAGIC)]}")
    genesis_hash = data[len(CHAIN_FILE_MAGIC) + 1 : header_len]

    blocks: list[Block] = []
    pos = header_len
    while pos < len(data):
        if pos + 4 > len(data):
            raise CorruptFile("truncated record length")
        rec_len = int.from_bytes(data[pos : pos + 4], "big")
        pos += 4
        if pos + rec_len > len(data):
            raise CorruptFile("truncated block record")
        try:
            blocks.append(decode_block(data[pos : pos + rec_len]))
        except DecodeError as exc:
            raise CorruptFile(f"undecodable block record: {exc}") from exc
        pos += rec_len

    if not blocks:
        raise CorruptFile("no blocks")
    if blocks[0].block_hash != genesis_hash:
        raise CorruptFile("header genesis hash does not match block 0")

    chain = Chain(blocks=blocks, clock=clock or SystemClock())
    for height, block in enumerate(blocks):
        for p, tx in enumerate(block.tx_list):
            chain.tx_index[tx.tx_id] = (height, p)
            if tx.sequence > chain.last_sequence.get(tx.sender, 0):
                chain.last_sequence[tx.sender] = tx.sequence

    report = verify_chain(chain)
    if not report.valid:
        raise CorruptFile(f"verification failed at height {report.height}: {report.reason}")
    return chain
