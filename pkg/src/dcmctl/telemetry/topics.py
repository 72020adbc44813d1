"""Topic tree and wildcard matching.

    dcm/telemetry/grid      ElectricalReading JSON, 1 s cadence
    dcm/telemetry/load      ElectricalReading JSON, 1 s cadence
    dcm/telemetry/battery   battery update JSON, 1 s cadence
    dcm/state/relays        relay bank, retained, on change
    dcm/state/decision      decision record, on change
    dcm/state/snapshot      full controller state, retained, every tick
    dcm/cmd/mode            {"mode": 0|1|2}
    dcm/cmd/estop           {"pressed": true|false}
    dcm/cmd/threshold       {"watts": n > 0}
    dcm/cmd/rejected        structured error replies to bad commands
"""

from __future__ import annotations

TELEMETRY_GRID = "dcm/telemetry/grid"
TELEMETRY_LOAD = "dcm/telemetry/load"
TELEMETRY_BATTERY = "dcm/telemetry/battery"
STATE_RELAYS = "dcm/state/relays"
STATE_DECISION = "dcm/state/decision"
STATE_SNAPSHOT = "dcm/state/snapshot"
CMD_MODE = "dcm/cmd/mode"
CMD_ESTOP = "dcm/cmd/estop"
CMD_THRESHOLD = "dcm/cmd/threshold"
CMD_REJECTED = "dcm/cmd/rejected"

CMD_PREFIX = "dcm/cmd/"

RETAINED_TOPICS = frozenset({STATE_RELAYS, STATE_SNAPSHOT})


def topic_matches(pattern: str, topic: str) -> bool:
    """MQTT-style filter match: + spans one level, # the remainder."""
    if pattern == "#":
        return True
    p_parts = pattern.split("/")
    t_parts = topic.split("/")
    for i, p in enumerate(p_parts):
        if p == "#":
            return i == len(p_parts) - 1
        if i >= len(t_parts):
            return False
        if p != "+" and p != t_parts[i]:
            return False
    return len(p_parts) == len(t_parts)
