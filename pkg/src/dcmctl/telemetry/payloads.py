"""Payload builders and command parsing for the topic contract."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import dcmctl.telemetry.topics as topics
from dcmctl.control.types import Decision, RelayBank
from dcmctl.plant.sim import ElectricalReading
from dcmctl.protocols.canbus import BmsUpdate


def build_reading_payload(reading: ElectricalReading) -> dict:
    return reading.as_payload()


def build_battery_payload(t: float, update: BmsUpdate) -> dict:
    return {
        "t": t,
        "soc": update.soc,
        "soh": update.soh,
        "v": update.pack_voltage,
        "i": update.pack_current,
        "temp": update.temperature,
        "alarms": sorted(update.alarms or ()),
    }


def build_relays_payload(t: float, bank: RelayBank) -> dict:
    return {"t": t, **bank.as_dict(), "mode": bank.mode}


def build_decision_payload(t: float, decision: Decision) -> dict:
    return {
        "t": t,
        "target": decision.target.value,
        "reason": decision.reason.value,
        "charging": decision.charging,
    }


def build_snapshot(
    t: float,
    bank: RelayBank,
    mode: int,
    em: bool,
    threshold_w: float,
    soc: Optional[float] = None,
    load_w: Optional[float] = None,
    grid_w: Optional[float] = None,
    pf_load: Optional[float] = None,
    pf_grid: Optional[float] = None,
    last_reason: Optional[str] = None,
) -> dict:
    return {
        "t": t,
        "soc": soc,
        "load_w": load_w,
        "grid_w": grid_w,
        "pf_load": pf_load,
        "pf_grid": pf_grid,
        "mode": int(mode),
        "em": bool(em),
        "threshold_w": threshold_w,
        "relays": bank.as_dict(),
        "last_reason": last_reason,
    }


@dataclass(frozen=True)
class Command:
    kind: str                     # set_mode | estop | clear_estop | set_threshold
    value: Optional[float] = None
    issued_at: float = 0.0
    source: str = "dashboard"


class CommandError(Exception):
    """Bad command; .topic/.payload carry what was rejected."""

    def __init__(self, message: str, topic: str, payload):
        super().__init__(message)
        self.topic = topic
        self.payload = payload

    def rejection_payload(self, t: float) -> dict:
        return {
            "t": t,
            "topic": self.topic,
            "error": str(self),
            "payload": self.payload,
        }


def parse_command(topic: str, payload, issued_at: float = 0.0, source: str = "dashboard") -> Command:
    """Map a dcm/cmd/* message to a Command, or raise CommandError."""
    if not isinstance(payload, dict):
        raise CommandError("payload must be a JSON object", topic, payload)

    if topic == topics.CMD_MODE:
        mode = payload.get("mode")
        if mode not in (0, 1, 2) or isinstance(mode, bool):
            raise CommandError(f"mode must be 0, 1, or 2, got {mode!r}", topic, payload)
        return Command("set_mode", float(mode), issued_at, source)

    if topic == topics.CMD_ESTOP:
        pressed = payload.get("pressed")
        if not isinstance(pressed, bool):
            raise CommandError(f"pressed must be a boolean, got {pressed!r}", topic, payload)
        return Command("estop" if pressed else "clear_estop", None, issued_at, source)

    if topic == topics.CMD_THRESHOLD:
        watts = payload.get("watts")
        if isinstance(watts, bool) or not isinstance(watts, (int, float)) or watts <= 0:
            raise CommandError(f"watts must be a number > 0, got {watts!r}", topic, payload)
        return Command("set_threshold", float(watts), issued_at, source)

    raise CommandError(f"unknown command topic {topic!r}", topic, payload)
