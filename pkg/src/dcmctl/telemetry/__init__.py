"""Topic contract, schema validation, in-process bus, and the
WebSocket bridge that serves the same contract to the dashboard."""

from dcmctl.telemetry import topics
from dcmctl.telemetry.bus import MessageBus, PublishError
from dcmctl.telemetry.payloads import (
    Command,
    CommandError,
    build_battery_payload,
    build_decision_payload,
    build_reading_payload,
    build_relays_payload,
    build_snapshot,
    parse_command,
)
from dcmctl.telemetry.schemas import SchemaError, has_schema, schema_for, validate

__all__ = [
    "Command",
    "CommandError",
    "MessageBus",
    "PublishError",
    "SchemaError",
    "build_battery_payload",
    "build_decision_payload",
    "build_reading_payload",
    "build_relays_payload",
    "build_snapshot",
    "has_schema",
    "parse_command",
    "schema_for",
    "topics",
    "validate",
]
