"""Measurement harness for the six public bank functions.

For each function it collects N samples (default 10) of client-observed
round-trip speed, gas used, and network fee, in this fixed order:

    Add Customer, Add KYC Customer Data, Get KYC Data,
    Deposit ETH, Withdraw ETH, Get Bank Balance

Registration-style functions get a fresh wallet per sample (they are
one-shot per address); deposits and withdrawals share one funded wallet.
Setup work (wallet creation, login, signing) happens outside the timer;
the timer brackets exactly one HTTP round trip. Samples run strictly
sequentially.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass

from albank.bankvm import UserRegistrationData
from albank.chain import Operation, sign_transaction
from albank.client import NodeClient, ServerError, tx_json
from albank.encoding import encode_biguint
from albank.errors import SetupFailed
from albank.units import eth_to_wei, wei_to_eth_str
from albank.wallet import create_wallet

FN_ADD_CUSTOMER = "Add Customer"
FN_ADD_KYC = "Add KYC Customer Data"
FN_GET_KYC = "Get KYC Data"
FN_DEPOSIT = "Deposit ETH"
FN_WITHDRAW = "Withdraw ETH"
FN_GET_BALANCE = "Get Bank Balance"

FUNCTIONS = (FN_ADD_CUSTOMER, FN_ADD_KYC, FN_GET_KYC, FN_DEPOSIT, FN_WITHDRAW, FN_GET_BALANCE)

PARAM_SPEED = "Transaction Speed"
PARAM_GAS = "Cumulative Gas Used"
PARAM_FEE = "Network fee"
PARAMETERS = (PARAM_SPEED, PARAM_GAS, PARAM_FEE)

DEFAULT_SAMPLES = 10
DEFAULT_DEPOSIT_WEI = 10**18  # 1 ETH per deposit sample
DEFAULT_WITHDRAW_WEI = 10**17


@dataclass
class MetricsRow:
    function: str
    sample: int  # 1-based
    speed_ms: float
    gas_units: int
    fee: int  # wei

    def __post_init__(self):
        if self.gas_units < 0 or self.fee < 0:
            raise ValueError("gas and fee are non-negative")


def sample_record(i: int) -> UserRegistrationData:
    """Deterministic registration record; fixed-width fields keep the gas
    column identical from one run to the next."""
    tag = f"{i:04d}"
    return UserRegistrationData(
        firstName=f"Sample{tag}",
        middleName="Q",
        lastName="Benchmark",
        dob="1990-01-15",
        email=f"sample{tag}@bench.example",
        phone="+1-555-0100",
        maritalStatus="Single",
        address_=f"{tag} Benchmark Way",
        city="Testville",
        state="TS",
        country="Testland",
        zip="99801",
        nationality="Testlandic",
        occupation="Engineer",
        employmentStatus="Employed",
        annualIncome=120000,
        idType="Passport",
        idNumber=f"P{tag}9001",
        idExpiry="2031-12-31",
    )


def _timed_post(client: NodeClient, path: str, body: dict) -> tuple[dict, float]:
    started = time.perf_counter()
    resp = client.post(path, body)
    return resp, (time.perf_counter() - started) * 1000.0


def _timed_get(client: NodeClient, path: str) -> tuple[dict, float]:
    started = time.perf_counter()
    resp = client.get(path)
    return resp, (time.perf_counter() - started) * 1000.0


def _write_row(function: str, sample: int, resp: dict, speed_ms: float) -> MetricsRow:
    return MetricsRow(function, sample, speed_ms, int(resp["gas_used"]), int(resp["network_fee"]))


def run_suite(
    client: NodeClient,
    samples: int = DEFAULT_SAMPLES,
    deposit_wei: int = DEFAULT_DEPOSIT_WEI,
    withdraw_wei: int = DEFAULT_WITHDRAW_WEI,
) -> list[MetricsRow]:
    """Collect len(FUNCTIONS) * samples rows against a running node."""
    if samples < 1:
        raise SetupFailed("samples must be at least 1")
    if withdraw_wei > deposit_wei:
        raise SetupFailed("withdrawals would exceed the deposited pool")
    rows: list[MetricsRow] = []

    def guard(function: str, sample: int, exc: ServerError) -> SetupFailed:
        return SetupFailed(f"{function} sample {sample} failed: {exc.message}")

    # Add Customer: fresh wallet per sample, enrollment is once per address.
    for i in range(1, samples + 1):
        wallet = create_wallet()
        try:
            client.login(wallet)
            tx = client.build_tx(wallet, Operation.ADD_CUSTOMER, 0, b"")
            resp, ms = _timed_post(client, "/bank/customers", {"tx": tx_json(tx)})
        except ServerError as exc:
            raise guard(FN_ADD_CUSTOMER, i, exc) from exc
        rows.append(_write_row(FN_ADD_CUSTOMER, i, resp, ms))

    # Add KYC Customer Data: fresh wallet per sample, registration is one-shot.
    from albank.kycflow import build_register_payload

    kyc_handles: list[bytes] = []
    for i in range(1, samples + 1):
        wallet = create_wallet()
        record = sample_record(i)
        try:
            client.login(wallet)
            payload = build_register_payload(wallet, record)
            tx = client.build_tx(wallet, Operation.REGISTER_KYC, 0, payload)
            resp, ms = _timed_post(
                client, "/kyc", {"tx": tx_json(tx), "record": record.as_dict()}
            )
        except ServerError as exc:
            raise guard(FN_ADD_KYC, i, exc) from exc
        rows.append(_write_row(FN_ADD_KYC, i, resp, ms))
        kyc_handles.append(bytes.fromhex(resp["kyc_token"]))

    # Get KYC Data: token lookups are reads, zero gas by construction.
    for i in range(1, samples + 1):
        handle = kyc_handles[(i - 1) % len(kyc_handles)]
        try:
            _, ms = _timed_get(client, f"/kyc/{handle.hex()}")
        except ServerError as exc:
            raise guard(FN_GET_KYC, i, exc) from exc
        rows.append(MetricsRow(FN_GET_KYC, i, ms, 0, 0))

    # Deposit / Withdraw: one funded wallet across samples.
    funded = create_wallet()
    try:
        client.login(funded)
    except ServerError as exc:
        raise guard(FN_DEPOSIT, 0, exc) from exc
    for i in range(1, samples + 1):
        try:
            tx = client.build_tx(funded, Operation.DEPOSIT, deposit_wei, b"")
            resp, ms = _timed_post(client, "/bank/deposit", {"tx": tx_json(tx)})
        except ServerError as exc:
            raise guard(FN_DEPOSIT, i, exc) from exc
        rows.append(_write_row(FN_DEPOSIT, i, resp, ms))
    for i in range(1, samples + 1):
        try:
            tx = client.build_tx(
                funded, Operation.WITHDRAW, 0, encode_biguint(withdraw_wei)
            )
            resp, ms = _timed_post(client, "/bank/withdraw", {"tx": tx_json(tx)})
        except ServerError as exc:
            raise guard(FN_WITHDRAW, i, exc) from exc
        rows.append(_write_row(FN_WITHDRAW, i, resp, ms))

    # Get Bank Balance: plain read on the funded wallet.
    for i in range(1, samples + 1):
        try:
            _, ms = _timed_get(client, f"/bank/balance/{funded.address.hex()}")
        except ServerError as exc:
            raise guard(FN_GET_BALANCE, i, exc) from exc
        rows.append(MetricsRow(FN_GET_BALANCE, i, ms, 0, 0))

    return rows


def summarize(rows: list[MetricsRow]) -> dict[str, dict[str, float]]:
    """Arithmetic mean of each parameter per function, file order."""
    if not rows:
        raise ValueError("no rows to summarize")
    out: dict[str, dict[str, float]] = {}
    for function in FUNCTIONS:
        hits = [r for r in rows if r.function == function]
        if not hits:
            continue
        out[function] = {
            PARAM_SPEED: statistics.mean(r.speed_ms for r in hits),
            PARAM_GAS: statistics.mean(r.gas_units for r in hits),
            PARAM_FEE: statistics.mean(r.fee for r in hits),
        }
    return out


# -- persistence ---------------------------------------------------------------
#
# csv: the measurement-table layout, one (function, parameter) line with one
#      column per sample; fees rendered as exact ETH decimals
# long: one line per sample with raw integer wei, friendlier to plotting

def _table_lines(rows: list[MetricsRow]) -> list[list[str]]:
    samples = sorted({r.sample for r in rows})
    lines = [["function", "parameter"] + [str(s) for s in samples]]
    for function in FUNCTIONS:
        per = {r.sample: r for r in rows if r.function == function}
        if not per:
            continue
        if sorted(per) != samples:
            raise ValueError(f"{function} is missing samples")
        ordered = [per[s] for s in samples]
        lines.append([function, PARAM_SPEED] + [str(r.speed_ms) for r in ordered])
        lines.append([function, PARAM_GAS] + [str(r.gas_units) for r in ordered])
        lines.append([function, PARAM_FEE] + [wei_to_eth_str(r.fee) for r in ordered])
    return lines


def export(rows: list[MetricsRow], path: str, format: str = "csv") -> None:
    if format not in ("csv", "long"):
        raise ValueError(f"unknown export format {format!r}")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if format == "csv":
            writer.writerows(_table_lines(rows))
        else:
            writer.writerow(["function", "sample", "speed_ms", "gas_units", "fee_wei"])
            for r in rows:
                writer.writerow([r.function, r.sample, r.speed_ms, r.gas_units, r.fee])


def import_rows(path: str) -> list[MetricsRow]:
    """Read either export format back into rows (exact round-trip)."""
    with open(path, newline="") as fh:
        lines = list(csv.reader(fh))
    if not lines:
        raise ValueError("empty metrics file")
    header = lines[0]
    if header[:2] == ["function", "sample"]:
        return [
            MetricsRow(fn, int(sample), float(speed), int(gas), int(fee))
            for fn, sample, speed, gas, fee in lines[1:]
        ]
    if header[:2] != ["function", "parameter"]:
        raise ValueError("unrecognized metrics header")
    samples = [int(s) for s in header[2:]]
    by_function: dict[str, dict[str, list[str]]] = {}
    order: list[str] = []
    for line in lines[1:]:
        function, parameter, values = line[0], line[1], line[2:]
        if parameter not in PARAMETERS:
            raise ValueError(f"unknown parameter {parameter!r}")
        if function not in by_function:
            by_function[function] = {}
            order.append(function)
        by_function[function][parameter] = values
    rows = []
    for function in order:
        params = by_function[function]
        if set(params) != set(PARAMETERS):
            raise ValueError(f"{function} is missing parameter lines")
        for idx, sample in enumerate(samples):
            rows.append(
                MetricsRow(
                    function,
                    sample,
                    float(params[PARAM_SPEED][idx]),
                    int(params[PARAM_GAS][idx]),
                    eth_to_wei(params[PARAM_FEE][idx]),
                )
            )
    return rows
