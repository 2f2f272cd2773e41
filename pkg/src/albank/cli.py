"""Command-line front door: wallet management, login, KYC submission, bank
operations, chain inspection, bench runs, and serving a node.

Every networked verb is a thin shim over the HTTP client; requests are
identical to what the web pages send for the same action. Exit codes:
0 success, 1 server-reported failure, 2 usage error, 3 connectivity.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass

import click

from albank.bankvm import RECORD_FIELDS, UserRegistrationData
from albank.client import NodeClient, ServerError
from albank.errors import AlbankError, NodeUnreachable, ValidationFailed
from albank.kycflow import validate_kyc
from albank.units import parse_amount, wei_to_eth_str
from albank.wallet import ADDRESS_LEN, Wallet, create_wallet, load_wallet, save_wallet

DEFAULT_ENDPOINT = "http://127.0.0.1:8545"

EXIT_OK = 0
EXIT_SERVER = 1
EXIT_USAGE = 2
EXIT_UNREACHABLE = 3


def make_client(endpoint: str) -> NodeClient:
    """Client constructor; tests swap this for an in-process transport."""
    return NodeClient(endpoint)


@dataclass
class CliSession:
    endpoint: str
    wallet_path: str
    machine: bool

    def client(self) -> NodeClient:
        return make_client(self.endpoint)

    def wallet(self) -> Wallet:
        if not os.path.exists(self.wallet_path):
            raise click.UsageError(
                f"no wallet at {self.wallet_path}; create one with 'albank wallet new'"
            )
        return load_wallet(self.wallet_path)


def _emit(session: CliSession, record: dict, lines: list[str] | None = None) -> None:
    if session.machine:
        click.echo(json.dumps(record, sort_keys=True))
    else:
        for line in lines if lines is not None else [f"{k}: {v}" for k, v in record.items()]:
            click.echo(line)


def _fail(session: CliSession, message: str, code: int, extra: dict | None = None) -> None:
    if session.machine:
        click.echo(json.dumps({"error": message, **(extra or {})}, sort_keys=True))
    else:
        click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guard(session: CliSession, fn):
    """Map client/domain failures onto the exit-code contract."""
    try:
        return fn()
    except NodeUnreachable as exc:
        _fail(session, str(exc), EXIT_UNREACHABLE)
    except ServerError as exc:
        extra = {}
        if isinstance(exc.body, dict) and "failures" in exc.body:
            extra["failures"] = exc.body["failures"]
        _fail(session, exc.message, EXIT_SERVER, extra)
    except AlbankError as exc:
        _fail(session, str(exc), EXIT_SERVER)


def _receipt_record(resp: dict) -> dict:
    return {
        "tx_id": resp.get("tx_id"),
        "block_height": resp.get("block_height"),
        "gas_used": resp.get("gas_used"),
        "network_fee": resp.get("network_fee"),
    }


def _address_arg(value: str) -> bytes:
    try:
        raw = bytes.fromhex(value)
    except ValueError:
        raise click.UsageError(f"{value!r} is not a hex address")
    if len(raw) != ADDRESS_LEN:
        raise click.UsageError(f"addresses are {ADDRESS_LEN} bytes")
    return raw


@click.group()
@click.option(
    "--endpoint",
    envvar="ALBANK_ENDPOINT",
    default=DEFAULT_ENDPOINT,
    show_default=True,
    help="node API base URL",
)
@click.option(
    "--wallet",
    "wallet_path",
    envvar="ALBANK_WALLET",
    default=lambda: os.path.join(click.get_app_dir("albank"), "wallet.bin"),
    help="wallet file path [default: <app dir>/wallet.bin]",
)
@click.option("--machine", is_flag=True, help="machine-readable output, one JSON record per line")
@click.pass_context
def main(ctx: click.Context, endpoint: str, wallet_path: str, machine: bool):
    """Desk bank node client."""
    ctx.obj = CliSession(endpoint.rstrip("/"), wallet_path, machine)


# -- wallet ------------------------------------------------------------------

@main.group()
def wallet():
    """Create or inspect the local wallet."""


@wallet.command("new")
@click.option("--force", is_flag=True, help="overwrite an existing wallet file")
@click.pass_obj
def wallet_new(session: CliSession, force: bool):
    if os.path.exists(session.wallet_path) and not force:
        raise click.UsageError(
            f"wallet already exists at {session.wallet_path} (use --force to replace it)"
        )
    os.makedirs(os.path.dirname(session.wallet_path) or ".", exist_ok=True)
    w = create_wallet()
    save_wallet(w, session.wallet_path)
    _emit(
        session,
        {"address": w.address.hex(), "path": session.wallet_path},
        [f"address: {w.address.hex()}", f"saved: {session.wallet_path}"],
    )


@wallet.command("show")
@click.pass_obj
def wallet_show(session: CliSession):
    w = session.wallet()
    _emit(
        session,
        {"address": w.address.hex(), "public_key": w.public_key.hex()},
        [f"address: {w.address.hex()}", f"public_key: {w.public_key.hex()}"],
    )


# -- auth ----------------------------------------------------------------------

@main.command()
@click.option(
    "--save",
    "save_path",
    default=None,
    help="write the session token to this file (explicitly opting into on-disk storage)",
)
@click.pass_obj
def login(session: CliSession, save_path: str | None):
    """Prove wallet ownership and obtain a session token."""
    w = session.wallet()

    def go():
        granted = session.client().login(w)
        if save_path:
            fd = os.open(save_path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
            with os.fdopen(fd, "w") as fh:
                fh.write(granted["token"])
        _emit(
            session,
            {"subject": granted["subject"], "token": granted["token"], "expires_at": granted["expires_at"]},
            [
                f"logged in as {granted['subject']}",
                f"token: {granted['token']}",
                f"expires_at: {granted['expires_at']}",
            ],
        )

    _guard(session, go)


# -- bank writes -----------------------------------------------------------------

@main.group()
def customer():
    """Customer enrollment."""


@customer.command("add")
@click.pass_obj
def customer_add(session: CliSession):
    w = session.wallet()

    def go():
        client = session.client()
        client.login(w)
        resp = client.add_customer(w)
        record = _receipt_record(resp)
        _emit(session, record, [f"customer added, tx {record['tx_id']}",
                                f"gas_used: {record['gas_used']}",
                                f"network_fee: {record['network_fee']} wei"])

    _guard(session, go)


@main.command()
@click.argument("amount")
@click.pass_obj
def deposit(session: CliSession, amount: str):
    """Deposit AMOUNT (e.g. 0.5eth or 2500wei) into the bank."""
    try:
        wei = parse_amount(amount)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    w = session.wallet()

    def go():
        client = session.client()
        client.login(w)
        resp = client.deposit(w, wei)
        record = {"amount_wei": str(wei), **_receipt_record(resp)}
        _emit(session, record, [f"deposited {wei} wei ({wei_to_eth_str(wei)} ETH), tx {record['tx_id']}",
                                f"gas_used: {record['gas_used']}",
                                f"network_fee: {record['network_fee']} wei"])

    _guard(session, go)


@main.command()
@click.argument("amount")
@click.pass_obj
def withdraw(session: CliSession, amount: str):
    """Withdraw AMOUNT (e.g. 0.5eth or 2500wei) from the bank."""
    try:
        wei = parse_amount(amount)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    w = session.wallet()

    def go():
        client = session.client()
        client.login(w)
        resp = client.withdraw(w, wei)
        record = {"amount_wei": str(wei), **_receipt_record(resp)}
        _emit(session, record, [f"withdrew {wei} wei ({wei_to_eth_str(wei)} ETH), tx {record['tx_id']}",
                                f"gas_used: {record['gas_used']}",
                                f"network_fee: {record['network_fee']} wei"])

    _guard(session, go)


@main.command()
@click.argument("address", required=False)
@click.pass_obj
def balance(session: CliSession, address: str | None):
    """Show the bank balance of ADDRESS (default: own wallet)."""
    raw = _address_arg(address) if address else session.wallet().address

    def go():
        wei = session.client().balance(raw)
        _emit(
            session,
            {"address": raw.hex(), "balance": str(wei)},
            [f"{wei} wei ({wei_to_eth_str(wei)} ETH)"],
        )

    _guard(session, go)


# -- kyc -------------------------------------------------------------------------

def _record_from_file(path: str) -> UserRegistrationData:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read record file: {exc}")
    if not isinstance(obj, dict):
        raise click.UsageError("record file must hold a JSON object")
    unknown = set(obj) - set(RECORD_FIELDS)
    if unknown:
        raise click.UsageError(f"unknown record fields: {', '.join(sorted(unknown))}")
    values = {}
    for name in RECORD_FIELDS:
        raw = obj.get(name, 0 if name == "annualIncome" else "")
        if name == "annualIncome":
            if isinstance(raw, str) and raw.isdigit():
                raw = int(raw)
            if isinstance(raw, bool) or not isinstance(raw, int):
                raise click.UsageError("annualIncome must be a non-negative integer")
        elif not isinstance(raw, str):
            raise click.UsageError(f"record field {name} must be a string")
        values[name] = raw
    return UserRegistrationData(**values)


@main.group()
def kyc():
    """Identity registration and retrieval."""


@kyc.command("submit")
@click.option("--file", "record_path", required=True, type=click.Path(), help="JSON record file")
@click.option("--yes", is_flag=True, help="skip the confirmation prompt")
@click.pass_obj
def kyc_submit(session: CliSession, record_path: str, yes: bool):
    data = _record_from_file(record_path)
    report = validate_kyc(data)
    if not report.ok:
        for field_name, message in report.failures:
            click.echo(f"{field_name}: {message}", err=not session.machine)
        _fail(session, "registration data failed validation", EXIT_SERVER,
              {"failures": [list(f) for f in report.failures]})
    if not yes and not click.confirm("Submit this registration to the ledger?"):
        _fail(session, "submission declined", EXIT_SERVER)
    w = session.wallet()

    def go():
        client = session.client()
        client.login(w)
        resp = client.submit_kyc(w, data)
        record = {"kyc_token": resp.get("kyc_token"), **_receipt_record(resp)}
        _emit(session, record, [f"registered, tx {record['tx_id']}",
                                f"kyc_token: {record['kyc_token']}",
                                f"gas_used: {record['gas_used']}",
                                f"network_fee: {record['network_fee']} wei"])

    _guard(session, go)


@kyc.command("get")
@click.argument("handle")
@click.pass_obj
def kyc_get(session: CliSession, handle: str):
    """Fetch a registration by KYC token, transaction id, or address."""
    try:
        raw = bytes.fromhex(handle)
    except ValueError:
        raise click.UsageError(f"{handle!r} is not a hex handle")

    def go():
        resp = session.client().get_kyc(raw)
        record = resp["record"]
        lines = [f"subject: {resp['subject']}", f"tx_id: {resp['tx_id']}"]
        lines += [f"{name}: {record[name]}" for name in RECORD_FIELDS]
        _emit(session, resp, lines)

    _guard(session, go)


# -- chain ------------------------------------------------------------------------

@main.command()
@click.argument("tx_id")
@click.pass_obj
def tx(session: CliSession, tx_id: str):
    """Look up a sealed transaction by id."""
    try:
        raw = bytes.fromhex(tx_id)
    except ValueError:
        raise click.UsageError(f"{tx_id!r} is not a hex transaction id")

    def go():
        resp = session.client().get_tx(raw)
        _emit(session, resp)

    _guard(session, go)


@main.group(name="chain")
def chain_group():
    """Ledger inspection."""


@chain_group.command("verify")
@click.pass_obj
def chain_verify(session: CliSession):
    def go():
        resp = session.client().verify_chain()
        if resp["valid"]:
            _emit(session, resp, [f"chain valid at height {resp['chain_height']}"])
        else:
            _fail(
                session,
                f"chain INVALID at height {resp['height']}: {resp['reason']}",
                EXIT_SERVER,
                resp,
            )

    _guard(session, go)


# -- bench -------------------------------------------------------------------------

@main.group(name="bench")
def bench_group():
    """Performance measurement."""


@bench_group.command("run")
@click.option("--samples", default=10, show_default=True, type=click.IntRange(min=1))
@click.option("--out", "out_path", default=None, help="write rows to this file")
@click.option("--format", "out_format", default="csv", type=click.Choice(["csv", "long"]), show_default=True)
@click.pass_obj
def bench_run(session: CliSession, samples: int, out_path: str | None, out_format: str):
    from albank import bench as benchmod

    def go():
        rows = benchmod.run_suite(session.client(), samples=samples)
        if out_path:
            benchmod.export(rows, out_path, out_format)
        if session.machine:
            for r in rows:
                click.echo(json.dumps({
                    "function": r.function, "sample": r.sample,
                    "speed_ms": r.speed_ms, "gas_units": r.gas_units, "fee_wei": str(r.fee),
                }))
        else:
            means = benchmod.summarize(rows)
            click.echo(f"{samples} samples per function")
            for function, params in means.items():
                click.echo(
                    f"{function}: mean speed {params[benchmod.PARAM_SPEED]:.2f} ms, "
                    f"mean gas {params[benchmod.PARAM_GAS]:.1f}, "
                    f"mean fee {wei_to_eth_str(int(params[benchmod.PARAM_FEE]))} ETH"
                )
            if out_path:
                click.echo(f"rows written to {out_path}")

    _guard(session, go)


# -- node --------------------------------------------------------------------------

@main.group(name="node")
def node_group():
    """Run a node."""


@node_group.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8545, show_default=True, type=int)
@click.option("--chain", "chain_path", default="albank.chain", show_default=True)
@click.option("--gas-price", default=10**9, show_default=True, type=int, help="wei per gas unit")
@click.option("--static", "static_dir", default=None, help="serve this directory at /")
@click.pass_obj
def node_serve(session: CliSession, host: str, port: int, chain_path: str, gas_price: int, static_dir: str | None):
    from albank import api
    from albank.node import Node, NodeConfig

    def go():
        config = NodeConfig(
            listen_host=host,
            listen_port=port,
            chain_path=chain_path,
            gas_price=gas_price,
            static_dir=static_dir,
        )
        node = Node(config).start()
        if not session.machine:
            click.echo(f"serving on http://{host}:{port} (chain: {chain_path})")
        try:
            api.serve(node)
        finally:
            node.shutdown()

    _guard(session, go)


if __name__ == "__main__":
    main()
