"""Deterministic bank + KYC contract state machine with gas metering.

Executes the four write operations (customer enrollment, one-time KYC
registration, deposits, guarded withdrawals) and two zero-cost views
against a single in-memory contract state. Write failures do not raise:
they come back as unsuccessful receipts carrying the contract's exact
revert message, with all state mutations rolled back and gas still
metered. View failures raise typed exceptions.

Gas schedule (deterministic stand-in for live-network measurements):
21,000 base per write transaction, 20,000 per 32-byte storage word newly
written, 5,000 per word overwritten, 16 per payload byte; views cost 0.
Network fee is always gas_used * gas_price.
"""

from __future__ import annotations

import copy
import time
from dataclasses import dataclass, field, fields
from math import ceil
from typing import Callable

from albank.chain import Operation, Transaction
from albank.encoding import (
    Reader,
    encode_biguint,
    encode_bytes,
    encode_str,
    encode_u8,
    encode_u32,
)
from albank.errors import DecodeError, InvalidAddress, NoSuchUser, UnknownOperation
from albank.wallet import ADDRESS_LEN, ZERO_ADDRESS

GAS_TX_BASE = 21_000
GAS_WORD_NEW = 20_000
GAS_WORD_UPDATE = 5_000
GAS_PAYLOAD_BYTE = 16
STORAGE_WORD_BYTES = 32

DEFAULT_GAS_PRICE = 10**9  # wei per gas unit

MSG_ALREADY_REGISTERED = "User is already registered"
MSG_INVALID_ADDRESS = "Invalid address"
MSG_NO_SUCH_USER = "User does not exist"
MSG_DEPOSIT_TOO_SMALL = "Please deposit at least 10 wei"
MSG_INSUFFICIENT_BALANCE = "You do not have sufficient balance"
MSG_REENTRANT = "Reentrant call"
MSG_ALREADY_CUSTOMER = "Customer already exists"

# Required-field checks in contract declaration order; first failure wins.
REQUIRED_FIELDS = [
    ("firstName", "First name is required"),
    ("lastName", "Last name is required"),
    ("dob", "Date of birth is required"),
    ("email", "Email is required"),
    ("phone", "Phone number is required"),
    ("address_", "Address is required"),
    ("city", "City is required"),
    ("state", "State is required"),
    ("country", "Country is required"),
    ("zip", "ZIP code is required"),
    ("idType", "ID type is required"),
    ("idNumber", "ID number is required"),
]


@dataclass(frozen=True)
class UserRegistrationData:
    firstName: str = ""
    middleName: str = ""
    lastName: str = ""
    dob: str = ""
    email: str = ""
    phone: str = ""
    maritalStatus: str = ""
    address_: str = ""
    city: str = ""
    state: str = ""
    country: str = ""
    zip: str = ""
    nationality: str = ""
    occupation: str = ""
    employmentStatus: str = ""
    annualIncome: int = 0
    idType: str = ""
    idNumber: str = ""
    idExpiry: str = ""

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


RECORD_FIELDS = [f.name for f in fields(UserRegistrationData)]


def encode_record(data: UserRegistrationData) -> bytes:
    """Canonical encoding of the 19 registration fields, struct order."""
    out = b""
    for name in RECORD_FIELDS:
        value = getattr(data, name)
        out += encode_biguint(value) if name == "annualIncome" else encode_str(value)
    return out


def decode_record(raw: bytes) -> UserRegistrationData:
    r = Reader(raw)
    values = {}
    for name in RECORD_FIELDS:
        values[name] = r.biguint() if name == "annualIncome" else r.str_()
    r.expect_end()
    return UserRegistrationData(**values)


@dataclass(frozen=True)
class Event:
    name: str
    args: tuple

    def encode(self, tx_id: bytes) -> bytes:
        """Frozen event-log record encoding: tx_id, name, tagged args."""
        out = tx_id + encode_str(self.name) + encode_u32(len(self.args))
        for arg in self.args:
            if isinstance(arg, bytes):
                out += encode_u8(1) + encode_bytes(arg)
            elif isinstance(arg, int):
                out += encode_u8(2) + encode_biguint(arg)
            else:
                raise ValueError(f"unencodable event arg {arg!r}")
        return out


@dataclass
class Receipt:
    tx_id: bytes
    success: bool
    events: list[Event]
    gas_used: int
    elapsed_ms: float
    network_fee: int
    error_message: str | None = None


@dataclass
class ContractState:
    owner: bytes = ZERO_ADDRESS
    userbalance: dict[bytes, int] = field(default_factory=dict)
    users: dict[bytes, UserRegistrationData] = field(default_factory=dict)
    customers: set[bytes] = field(default_factory=set)
    locked: bool = False
    pool: int = 0

    def total_balances(self) -> int:
        return sum(self.userbalance.values())


def record_storage_words(data: UserRegistrationData) -> int:
    return ceil(len(encode_record(data)) / STORAGE_WORD_BYTES)


def gas_for(payload_len: int, new_words: int = 0, updated_words: int = 0) -> int:
    return (
        GAS_TX_BASE
        + GAS_WORD_NEW * new_words
        + GAS_WORD_UPDATE * updated_words
        + GAS_PAYLOAD_BYTE * payload_len
    )


def is_registered(record: UserRegistrationData | None) -> bool:
    """Mirror image of the contract's onlyOnce emptiness test."""
    if record is None:
        return False
    return bool(record.firstName or record.idType or record.idNumber)


class BankVM:
    """Single-threaded contract instance; the sequencer feeds it one
    transaction at a time. The reentrancy latch models intra-transaction
    re-entry through the value-transfer hook, not thread races."""

    def __init__(self, gas_price: int = DEFAULT_GAS_PRICE, owner: bytes = ZERO_ADDRESS):
        self.state = ContractState(owner=owner)
        self.gas_price = gas_price
        self._transfer_hook: Callable[[bytes, int], None] | None = None

    def set_transfer_hook(self, callback: Callable[[bytes, int], None] | None) -> None:
        """Invoked with (recipient, amount) whenever withdraw moves value;
        lets tests script reentrancy attacks. No hook means a plain no-op
        transfer."""
        self._transfer_hook = callback

    # -- receipt plumbing --------------------------------------------------

    def _receipt(
        self,
        tx_id: bytes,
        success: bool,
        events: list[Event],
        gas_used: int,
        started: float,
        error: str | None = None,
    ) -> Receipt:
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        if success:
            events = events + [
                Event("GasConsumption", (gas_used,)),
                Event("ElapsedTime", (int(elapsed_ms),)),
            ]
        return Receipt(
            tx_id=tx_id,
            success=success,
            events=events,
            gas_used=gas_used,
            elapsed_ms=elapsed_ms,
            network_fee=gas_used * self.gas_price,
            error_message=error,
        )

    def _revert(self, tx_id: bytes, payload_len: int, started: float, message: str) -> Receipt:
        # failures still pay base + payload gas, never storage gas
        return self._receipt(
            tx_id, False, [], gas_for(payload_len), started, error=message
        )

    # -- write operations ----------------------------------------------------

    def add_customer(self, sender: bytes, payload_len: int = 0, tx_id: bytes = b"\x00" * 32) -> Receipt:
        started = time.perf_counter()
        if sender in self.state.customers:
            return self._revert(tx_id, payload_len, started, MSG_ALREADY_CUSTOMER)
        self.state.customers.add(sender)
        gas = gas_for(payload_len, new_words=1)
        return self._receipt(tx_id, True, [], gas, started)

    def register_user(
        self,
        sender: bytes,
        data: UserRegistrationData,
        payload_len: int | None = None,
        tx_id: bytes = b"\x00" * 32,
    ) -> Receipt:
        started = time.perf_counter()
        if payload_len is None:
            payload_len = len(encode_record(data))
        if is_registered(self.state.users.get(sender)):
            return self._revert(tx_id, payload_len, started, MSG_ALREADY_REGISTERED)
        for name, message in REQUIRED_FIELDS:
            if not getattr(data, name):
                return self._revert(tx_id, payload_len, started, message)
        self.state.users[sender] = data
        gas = gas_for(payload_len, new_words=record_storage_words(data))
        return self._receipt(tx_id, True, [Event("UserRegistered", (sender,))], gas, started)

    def deposit(
        self, sender: bytes, value: int, payload_len: int = 0, tx_id: bytes = b"\x00" * 32
    ) -> Receipt:
        started = time.perf_counter()
        if value <= 10:  # strict-greater per the contract code, prose notwithstanding
            return self._revert(tx_id, payload_len, started, MSG_DEPOSIT_TOO_SMALL)
        new_words = 0 if sender in self.state.userbalance else 1
        self.state.userbalance[sender] = self.state.userbalance.get(sender, 0) + value
        self.state.pool += value
        gas = gas_for(payload_len, new_words=new_words, updated_words=2 - new_words)
        return self._receipt(tx_id, True, [Event("Deposit", (sender, value))], gas, started)

    def withdraw(
        self,
        sender: bytes,
        amount: int,
        payload_len: int | None = None,
        tx_id: bytes = b"\x00" * 32,
    ) -> Receipt:
        started = time.perf_counter()
        if payload_len is None:
            payload_len = len(encode_biguint(amount))
        if self.state.locked:
            return self._revert(tx_id, payload_len, started, MSG_REENTRANT)
        if amount > self.state.userbalance.get(sender, 0):
            return self._revert(tx_id, payload_len, started, MSG_INSUFFICIENT_BALANCE)

        # The transfer hook may run arbitrary code mid-flight; snapshot so a
        # failed transfer rolls everything (including nested calls) back.
        snapshot = copy.deepcopy(self.state)
        new_words = 0 if sender in self.state.userbalance else 1
        self.state.locked = True
        try:
            self.state.userbalance[sender] = self.state.userbalance.get(sender, 0) - amount
            self.state.pool -= amount
            if self._transfer_hook is not None:
                self._transfer_hook(sender, amount)
        except Exception as exc:
            self.state = snapshot
            self.state.locked = False
            return self._revert(tx_id, payload_len, started, f"transfer failed: {exc}")
        finally:
            self.state.locked = False
        gas = gas_for(payload_len, new_words=new_words, updated_words=2 - new_words)
        return self._receipt(tx_id, True, [Event("Withdrawal", (sender, amount))], gas, started)

    # -- view operations (zero gas, zero fee, no state change) ---------------

    def get_user(self, queried: bytes) -> UserRegistrationData:
        if queried == ZERO_ADDRESS or len(queried) != ADDRESS_LEN:
            raise InvalidAddress(MSG_INVALID_ADDRESS)
        record = self.state.users.get(queried)
        if not is_registered(record):
            raise NoSuchUser(MSG_NO_SUCH_USER)
        return record

    def get_balance(self, sender: bytes) -> int:
        return self.state.userbalance.get(sender, 0)

    # -- dispatcher ----------------------------------------------------------

    def execute(self, tx: Transaction, kyc_record: UserRegistrationData | None = None) -> Receipt:
        """Dispatch a decoded transaction to the matching operation.

        RegisterKyc carries only ciphertext on the wire; the node supplies
        the plaintext record it received over the authenticated channel.
        Decode problems raise and leave state untouched; contract-level
        failures come back as revert receipts.
        """
        payload_len = len(tx.payload)
        if tx.operation == Operation.ADD_CUSTOMER:
            if tx.payload != b"" or tx.value != 0:
                raise DecodeError("add-customer takes no payload or value")
            return self.add_customer(tx.sender, payload_len, tx.tx_id)
        if tx.operation == Operation.REGISTER_KYC:
            if tx.value != 0:
                raise DecodeError("register-kyc takes no value")
            if kyc_record is None:
                raise DecodeError("register-kyc needs the plaintext record sidecar")
            return self.register_user(tx.sender, kyc_record, payload_len, tx.tx_id)
        if tx.operation == Operation.DEPOSIT:
            if tx.payload != b"":
                raise DecodeError("deposit takes no payload")
            return self.deposit(tx.sender, tx.value, payload_len, tx.tx_id)
        if tx.operation == Operation.WITHDRAW:
            r = Reader(tx.payload)
            amount = r.biguint()
            r.expect_end()
            # tx.value ignored: the contract marks withdraw payable but never
            # reads msg.value
            return self.withdraw(tx.sender, amount, payload_len, tx.tx_id)
        raise UnknownOperation(f"no contract function for operation {tx.operation}")
