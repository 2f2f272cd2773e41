"""Contract VM tests: revert messages, gas arithmetic, the reentrancy
latch, rollback, and conservation against a plain-map oracle."""

from __future__ import annotations

import random
from math import ceil

import pytest
from hypothesis import given, settings, strategies as st

from albank.bankvm import (
    GAS_PAYLOAD_BYTE,
    GAS_TX_BASE,
    GAS_WORD_NEW,
    GAS_WORD_UPDATE,
    MSG_ALREADY_CUSTOMER,
    MSG_ALREADY_REGISTERED,
    MSG_DEPOSIT_TOO_SMALL,
    MSG_INSUFFICIENT_BALANCE,
    MSG_INVALID_ADDRESS,
    MSG_NO_SUCH_USER,
    MSG_REENTRANT,
    REQUIRED_FIELDS,
    BankVM,
    UserRegistrationData,
    decode_record,
    encode_record,
)
from albank.chain import Operation, sign_transaction
from albank.encoding import encode_biguint
from albank.errors import DecodeError, InvalidAddress, NoSuchUser
from albank.wallet import ZERO_ADDRESS, create_wallet
from conftest import make_record

ALICE = create_wallet(seed=b"vm-alice")
BOB = create_wallet(seed=b"vm-bob")

A, B = ALICE.address, BOB.address


class TestDeposit:
    def test_minimum_is_strictly_above_ten(self):
        vm = BankVM()
        r = vm.deposit(A, 10)
        assert not r.success
        assert r.error_message == MSG_DEPOSIT_TOO_SMALL
        assert vm.get_balance(A) == 0
        assert vm.deposit(A, 11).success
        assert vm.get_balance(A) == 11

    def test_zero_and_small_values_rejected(self):
        vm = BankVM()
        for value in (0, 1, 9, 10):
            assert vm.deposit(A, value).error_message == MSG_DEPOSIT_TOO_SMALL
        assert vm.state.pool == 0

    def test_deposits_accumulate(self):
        vm = BankVM()
        vm.deposit(A, 100)
        vm.deposit(A, 50)
        assert vm.get_balance(A) == 150
        assert vm.state.pool == 150

    def test_deposit_event(self):
        vm = BankVM()
        r = vm.deposit(A, 75)
        assert ("Deposit", (A, 75)) in [(e.name, e.args) for e in r.events]


class TestWithdraw:
    def test_insufficient_balance_message(self):
        vm = BankVM()
        vm.deposit(A, 100)
        r = vm.withdraw(A, 101)
        assert not r.success
        assert r.error_message == MSG_INSUFFICIENT_BALANCE
        assert vm.get_balance(A) == 100

    def test_exact_balance_withdrawal_allowed(self):
        vm = BankVM()
        vm.deposit(A, 100)
        assert vm.withdraw(A, 100).success
        assert vm.get_balance(A) == 0
        assert vm.state.pool == 0

    def test_unknown_sender_cannot_withdraw(self):
        vm = BankVM()
        assert vm.withdraw(B, 1).error_message == MSG_INSUFFICIENT_BALANCE

    def test_withdrawal_event(self):
        vm = BankVM()
        vm.deposit(A, 100)
        r = vm.withdraw(A, 40)
        assert ("Withdrawal", (A, 40)) in [(e.name, e.args) for e in r.events]

    def test_failed_transfer_rolls_back(self):
        vm = BankVM()
        vm.deposit(A, 100)

        def exploding(recipient, amount):
            raise RuntimeError("wire down")

        vm.set_transfer_hook(exploding)
        r = vm.withdraw(A, 60)
        assert not r.success
        assert "transfer failed" in r.error_message
        assert vm.get_balance(A) == 100
        assert vm.state.pool == 100
        assert not vm.state.locked


class TestReentrancy:
    def test_nested_withdraw_is_rejected_and_single_debited(self):
        vm = BankVM()
        vm.deposit(A, 1000)
        inner: list = []

        def reenter(recipient, amount):
            # malicious receiver tries to drain by calling back in
            inner.append(vm.withdraw(A, amount))

        vm.set_transfer_hook(reenter)
        outer = vm.withdraw(A, 300)
        assert outer.success
        assert len(inner) == 1
        assert not inner[0].success
        assert inner[0].error_message == MSG_REENTRANT
        # exactly one debit happened
        assert vm.get_balance(A) == 700
        assert vm.state.pool == 700

    def test_repeated_nested_attempts_all_rejected(self):
        vm = BankVM()
        vm.deposit(A, 1000)
        inner: list = []

        def reenter(recipient, amount):
            for _ in range(5):
                inner.append(vm.withdraw(A, 1))

        vm.set_transfer_hook(reenter)
        assert vm.withdraw(A, 100).success
        assert [r.error_message for r in inner] == [MSG_REENTRANT] * 5
        assert vm.get_balance(A) == 900

    def test_latch_released_after_completion(self):
        vm = BankVM()
        vm.deposit(A, 100)
        vm.set_transfer_hook(lambda r, a: None)
        assert vm.withdraw(A, 10).success
        assert vm.withdraw(A, 10).success  # second top-level call is fine
        assert vm.get_balance(A) == 80


class TestRegistration:
    def test_register_then_fetch(self):
        vm = BankVM()
        record = make_record()
        assert vm.register_user(A, record).success
        assert vm.get_user(A) == record

    def test_second_registration_rejected(self):
        vm = BankVM()
        vm.register_user(A, make_record())
        r = vm.register_user(A, make_record(firstName="Other"))
        assert not r.success
        assert r.error_message == MSG_ALREADY_REGISTERED
        assert vm.get_user(A).firstName == "Avery"

    def test_required_field_messages_in_declaration_order(self):
        for name, message in REQUIRED_FIELDS:
            vm = BankVM()
            r = vm.register_user(A, make_record(**{name: ""}))
            assert not r.success
            assert r.error_message == message, name

    def test_first_missing_field_wins(self):
        vm = BankVM()
        r = vm.register_user(A, make_record(firstName="", zip=""))
        assert r.error_message == "First name is required"

    def test_all_twelve_messages(self):
        expected = {
            "firstName": "First name is required",
            "lastName": "Last name is required",
            "dob": "Date of birth is required",
            "email": "Email is required",
            "phone": "Phone number is required",
            "address_": "Address is required",
            "city": "City is required",
            "state": "State is required",
            "country": "Country is required",
            "zip": "ZIP code is required",
            "idType": "ID type is required",
            "idNumber": "ID number is required",
        }
        assert dict(REQUIRED_FIELDS) == expected

    def test_failed_registration_stores_nothing(self):
        vm = BankVM()
        vm.register_user(A, make_record(email=""))
        with pytest.raises(NoSuchUser):
            vm.get_user(A)

    def test_add_customer_once(self):
        vm = BankVM()
        assert vm.add_customer(A).success
        r = vm.add_customer(A)
        assert not r.success
        assert r.error_message == MSG_ALREADY_CUSTOMER


class TestViews:
    def test_zero_address_is_invalid(self):
        vm = BankVM()
        with pytest.raises(InvalidAddress) as exc:
            vm.get_user(ZERO_ADDRESS)
        assert str(exc.value) == MSG_INVALID_ADDRESS

    def test_wrong_length_address_is_invalid(self):
        vm = BankVM()
        with pytest.raises(InvalidAddress):
            vm.get_user(b"\x01" * 19)

    def test_unknown_user(self):
        vm = BankVM()
        with pytest.raises(NoSuchUser) as exc:
            vm.get_user(A)
        assert str(exc.value) == MSG_NO_SUCH_USER

    def test_fresh_balance_is_zero(self):
        assert BankVM().get_balance(A) == 0

    def test_views_change_no_state(self):
        vm = BankVM()
        vm.deposit(A, 50)
        vm.register_user(A, make_record())
        before = (dict(vm.state.userbalance), dict(vm.state.users), vm.state.pool)
        vm.get_balance(A)
        vm.get_user(A)
        with pytest.raises(NoSuchUser):
            vm.get_user(B)
        assert (dict(vm.state.userbalance), dict(vm.state.users), vm.state.pool) == before


class TestGasSchedule:
    """Expected values recomputed with explicit arithmetic, not gas_for."""

    def test_add_customer_gas(self):
        vm = BankVM()
        r = vm.add_customer(A)
        assert r.gas_used == 21_000 + 20_000

    def test_first_deposit_vs_update(self):
        vm = BankVM()
        first = vm.deposit(A, 100)
        second = vm.deposit(A, 100)
        assert first.gas_used == 21_000 + 20_000 + 5_000  # new slot + pool update
        assert second.gas_used == 21_000 + 2 * 5_000

    def test_withdraw_gas_counts_payload(self):
        vm = BankVM()
        vm.deposit(A, 10**18)
        payload_len = len(encode_biguint(10**17))
        r = vm.withdraw(A, 10**17, payload_len=payload_len)
        assert r.gas_used == 21_000 + 16 * payload_len + 2 * 5_000

    def test_registration_gas_scales_with_record_words(self):
        vm = BankVM()
        record = make_record()
        encoded_len = len(encode_record(record))
        r = vm.register_user(A, record)
        assert r.gas_used == 21_000 + 16 * encoded_len + 20_000 * ceil(encoded_len / 32)

    def test_failures_charge_base_plus_payload_only(self):
        vm = BankVM()
        r = vm.deposit(A, 5, payload_len=7)
        assert r.gas_used == 21_000 + 16 * 7
        r = vm.withdraw(A, 10, payload_len=3)
        assert r.gas_used == 21_000 + 16 * 3

    def test_fee_is_gas_times_price(self):
        vm = BankVM(gas_price=7)
        r = vm.deposit(A, 100)
        assert r.network_fee == r.gas_used * 7

    def test_success_receipts_carry_meter_events(self):
        vm = BankVM()
        r = vm.deposit(A, 100)
        names = [e.name for e in r.events]
        assert names[-2:] == ["GasConsumption", "ElapsedTime"]
        gas_event = r.events[-2]
        assert gas_event.args == (r.gas_used,)

    def test_revert_receipts_have_no_events(self):
        vm = BankVM()
        assert vm.deposit(A, 1).events == []

    def test_constants(self):
        assert (GAS_TX_BASE, GAS_WORD_NEW, GAS_WORD_UPDATE, GAS_PAYLOAD_BYTE) == (
            21_000,
            20_000,
            5_000,
            16,
        )


class TestDispatcher:
    def _vm(self):
        return BankVM()

    def test_deposit_tx(self):
        vm = self._vm()
        tx = sign_transaction(ALICE, Operation.DEPOSIT, 500, b"", 1)
        r = vm.execute(tx)
        assert r.success and r.tx_id == tx.tx_id
        assert vm.get_balance(A) == 500

    def test_withdraw_tx_ignores_value(self):
        vm = self._vm()
        vm.execute(sign_transaction(ALICE, Operation.DEPOSIT, 500, b"", 1))
        tx = sign_transaction(ALICE, Operation.WITHDRAW, 123, encode_biguint(200), 2)
        assert vm.execute(tx).success
        assert vm.get_balance(A) == 300  # the signed value field played no part

    def test_register_tx_needs_record(self):
        vm = self._vm()
        tx = sign_transaction(ALICE, Operation.REGISTER_KYC, 0, b"x", 1)
        with pytest.raises(DecodeError):
            vm.execute(tx)

    def test_add_customer_rejects_payload_or_value(self):
        vm = self._vm()
        with pytest.raises(DecodeError):
            vm.execute(sign_transaction(ALICE, Operation.ADD_CUSTOMER, 0, b"x", 1))
        with pytest.raises(DecodeError):
            vm.execute(sign_transaction(ALICE, Operation.ADD_CUSTOMER, 5, b"", 1))
        assert A not in vm.state.customers

    def test_deposit_rejects_payload(self):
        vm = self._vm()
        with pytest.raises(DecodeError):
            vm.execute(sign_transaction(ALICE, Operation.DEPOSIT, 100, b"zz", 1))
        assert vm.get_balance(A) == 0

    def test_withdraw_payload_is_strict(self):
        vm = self._vm()
        vm.execute(sign_transaction(ALICE, Operation.DEPOSIT, 500, b"", 1))
        bad = encode_biguint(10) + b"\x00"
        with pytest.raises(DecodeError):
            vm.execute(sign_transaction(ALICE, Operation.WITHDRAW, 0, bad, 2))
        assert vm.get_balance(A) == 500


class TestRecordCodec:
    def test_round_trip(self):
        record = make_record()
        assert decode_record(encode_record(record)) == record

    @given(
        st.builds(
            make_record,
            firstName=st.text(max_size=40),
            middleName=st.text(max_size=40),
            email=st.text(max_size=60),
            annualIncome=st.integers(min_value=0, max_value=2**64),
        )
    )
    @settings(max_examples=50)
    def test_round_trip_property(self, record):
        assert decode_record(encode_record(record)) == record

    def test_trailing_bytes_rejected(self):
        raw = encode_record(make_record()) + b"\x00"
        with pytest.raises(DecodeError):
            decode_record(raw)


class _MapOracle:
    """Brute-force reference: balances in a plain dict, no gas, no events."""

    def __init__(self):
        self.balances: dict[bytes, int] = {}
        self.pool = 0

    def deposit(self, who: bytes, value: int) -> bool:
        if value <= 10:
            return False
        self.balances[who] = self.balances.get(who, 0) + value
        self.pool += value
        return True

    def withdraw(self, who: bytes, amount: int) -> bool:
        if amount > self.balances.get(who, 0):
            return False
        # a zero withdraw from an unseen sender still materializes the slot
        self.balances[who] = self.balances.get(who, 0) - amount
        self.pool -= amount
        return True


ACTORS = [create_wallet(seed=b"conserve-%d" % i).address for i in range(4)]


class TestConservation:
    @given(
        st.lists(
            st.tuples(
                st.sampled_from(ACTORS),
                st.sampled_from(["deposit", "withdraw"]),
                st.integers(min_value=0, max_value=500),
            ),
            max_size=60,
        )
    )
    @settings(max_examples=50)
    def test_pool_equals_sum_of_balances(self, ops):
        vm = BankVM()
        oracle = _MapOracle()
        for who, op, amount in ops:
            if op == "deposit":
                receipt = vm.deposit(who, amount)
                expected = oracle.deposit(who, amount)
            else:
                receipt = vm.withdraw(who, amount)
                expected = oracle.withdraw(who, amount)
            assert receipt.success == expected
            assert vm.state.pool == oracle.pool
            assert vm.state.pool == vm.state.total_balances()
        for who in ACTORS:
            assert vm.get_balance(who) == oracle.balances.get(who, 0)

    def test_seeded_long_run_matches_oracle(self):
        rng = random.Random(0xA15BA)
        vm = BankVM()
        oracle = _MapOracle()
        for step in range(300):
            who = rng.choice(ACTORS)
            if rng.random() < 0.55:
                amount = rng.randint(0, 10_000)
                assert vm.deposit(who, amount).success == oracle.deposit(who, amount), step
            else:
                amount = rng.randint(0, 12_000)
                assert vm.withdraw(who, amount).success == oracle.withdraw(who, amount), step
            assert vm.state.pool == oracle.pool == vm.state.total_balances()
        assert {w: vm.get_balance(w) for w in ACTORS} == {
            w: oracle.balances.get(w, 0) for w in ACTORS
        }
