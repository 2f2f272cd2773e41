"""Shared fixtures: disposable nodes, in-process API clients, record data."""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from albank.api import create_app
from albank.bankvm import UserRegistrationData
from albank.client import NodeClient
from albank.node import Node, NodeConfig

BASE_RECORD = {
    "firstName": "Avery",
    "middleName": "J",
    "lastName": "Stone",
    "dob": "1988-04-02",
    "email": "avery.stone@example.com",
    "phone": "+1-907-555-0114",
    "maritalStatus": "Married",
    "address_": "17 Harbor Lane",
    "city": "Juneau",
    "state": "AK",
    "country": "USA",
    "zip": "99801",
    "nationality": "American",
    "occupation": "Pilot",
    "employmentStatus": "Employed",
    "annualIncome": 98000,
    "idType": "Passport",
    "idNumber": "P4815162342",
    "idExpiry": "2030-06-30",
}


def make_record(**overrides) -> UserRegistrationData:
    values = dict(BASE_RECORD)
    values.update(overrides)
    return UserRegistrationData(**values)


@pytest.fixture
def valid_record():
    return make_record()


@pytest.fixture
def record_factory():
    return make_record


@pytest.fixture
def node_factory(tmp_path):
    """Builds started nodes on throwaway chain files; reusing a name
    resumes from its persisted chain."""
    def make(name: str = "node", **overrides) -> Node:
        config = NodeConfig(chain_path=str(tmp_path / f"{name}.chain"), **overrides)
        return Node(config).start()

    return make


@pytest.fixture
def node(node_factory):
    return node_factory()


@pytest.fixture
def client_for():
    """NodeClient bound straight to a node's ASGI app, no sockets."""
    def make(node: Node) -> NodeClient:
        return NodeClient("http://testserver", http=TestClient(create_app(node)))

    return make


@pytest.fixture
def api_client(node, client_for):
    return client_for(node)
