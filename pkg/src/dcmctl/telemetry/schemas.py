"""Schema registry: topic -> JSON Schema, loaded from package data.

Outbound state and telemetry payloads are validated before publication;
a violation is an internal bug and the message is never published.
Command topics are deliberately NOT enforced at the bus so malformed
operator input reaches parse_command, which answers with a structured
reply on dcm/cmd/rejected instead of silently dropping it.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema

import dcmctl.telemetry.topics as topics


class SchemaError(Exception):
    """Payload does not validate against the schema for its topic."""


_SCHEMA_FILES = {
    topics.TELEMETRY_GRID: "electrical_reading.json",
    topics.TELEMETRY_LOAD: "electrical_reading.json",
    topics.TELEMETRY_BATTERY: "battery.json",
    topics.STATE_RELAYS: "relays.json",
    topics.STATE_DECISION: "decision.json",
    topics.STATE_SNAPSHOT: "snapshot.json",
    topics.CMD_MODE: "cmd_mode.json",
    topics.CMD_ESTOP: "cmd_estop.json",
    topics.CMD_THRESHOLD: "cmd_threshold.json",
    topics.CMD_REJECTED: "rejected.json",
}

# topics the daemon itself produces: enforced at publish time
STRICT_TOPICS = frozenset(
    t for t in _SCHEMA_FILES if not t.startswith(topics.CMD_PREFIX)
) | {topics.CMD_REJECTED}


@lru_cache(maxsize=None)
def schema_for(topic: str) -> dict:
    filename = _SCHEMA_FILES.get(topic)
    if filename is None:
        raise KeyError(f"no schema registered for topic {topic!r}")
    ref = resources.files("dcmctl.telemetry") / "schemas" / filename
    return json.loads(ref.read_text())


@lru_cache(maxsize=None)
def _validator(topic: str) -> jsonschema.Draft202012Validator:
    return jsonschema.Draft202012Validator(schema_for(topic))


def validate(topic: str, payload) -> None:
    """Raise SchemaError when payload violates the topic's schema."""
    try:
        _validator(topic).validate(payload)
    except jsonschema.ValidationError as e:
        raise SchemaError(f"{topic}: {e.message}") from e


def has_schema(topic: str) -> bool:
    return topic in _SCHEMA_FILES
