"""WebSocket bridge sessions against the live app."""

import pytest
from starlette.testclient import TestClient

from dcmctl.control.types import RelayBank
from dcmctl.telemetry import topics
from dcmctl.telemetry.bridge import create_app
from dcmctl.telemetry.bus import MessageBus
from dcmctl.telemetry.payloads import build_relays_payload, build_snapshot


@pytest.fixture()
def bus():
    return MessageBus()


@pytest.fixture()
def client(bus):
    return TestClient(create_app(bus))


def test_healthz(client):
    r = client.get("/healthz")
    assert r.status_code == 200
    assert r.json() == {"ok": True}


def test_retained_state_arrives_first(bus, client):
    snap = build_snapshot(3.0, RelayBank.battery(), 0, False, 700.0)
    bus.publish(topics.STATE_SNAPSHOT, snap, retain=True)
    with client.websocket_connect("/ws") as ws:
        frame = ws.receive_json()
        assert frame["topic"] == topics.STATE_SNAPSHOT
        assert frame["payload"] == snap


def test_live_publish_streams_to_client(bus, client):
    with client.websocket_connect("/ws") as ws:
        payload = build_relays_payload(1.0, RelayBank.grid())
        bus.publish(topics.STATE_RELAYS, payload)
        frame = ws.receive_json()
        assert frame == {"topic": topics.STATE_RELAYS, "payload": payload}


def test_client_command_lands_on_bus(bus, client):
    got = []
    bus.subscribe("dcm/cmd/#", lambda t, p: got.append((t, p)))
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"topic": topics.CMD_MODE, "payload": {"mode": 1}})
        # round-trip: our own publish comes back on the feed
        frame = ws.receive_json()
        assert frame["topic"] == topics.CMD_MODE
    assert got == [(topics.CMD_MODE, {"mode": 1})]


def test_non_command_topic_is_refused_locally(bus, client):
    got = []
    bus.subscribe("#", lambda t, p: got.append(t))
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"topic": topics.STATE_SNAPSHOT, "payload": {}})
        frame = ws.receive_json()
        assert "error" in frame
    assert got == []


def test_garbage_frame_gets_error_not_disconnect(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_json(["not", "a", "frame"])
        frame = ws.receive_json()
        assert "error" in frame
        # connection still usable
        ws.send_json({"topic": topics.CMD_ESTOP, "payload": {"pressed": False}})
        frame = ws.receive_json()
        assert frame["topic"] == topics.CMD_ESTOP


def test_two_clients_both_receive(bus, client):
    with client.websocket_connect("/ws") as a, client.websocket_connect("/ws") as b:
        payload = build_relays_payload(2.0, RelayBank.battery())
        bus.publish(topics.STATE_RELAYS, payload)
        assert a.receive_json()["payload"] == payload
        assert b.receive_json()["payload"] == payload
