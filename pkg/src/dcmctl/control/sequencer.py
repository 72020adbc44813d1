"""Relay transition planning.

Transitions are planned as ordered action lists diffed against the
current bank, so re-planning an already-reached target yields nothing.

Closing the external DC relay is the one step that needs care: the
PCB-level relays are repositioned first, then a 0.25 s settle delay,
then the DC link closes, then the load relays move onto the inverter.
That keeps the inverter input from being hot-plugged mid-bounce and the
loads from landing on an inverter that has no DC supply yet.

Sequences that only open the DC link (back to grid, or the emergency
drop) run with zero scheduled delay: the NC contacts already point at
the grid, so speed is what matters.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Tuple, Union

from dcmctl.control.types import (
    BatteryPath,
    Decision,
    ExternalRelay,
    LoadSource,
    RelayBank,
    Target,
)

SETTLE_DELAY_S = 0.25


@dataclass(frozen=True)
class SetRelay:
    field: str       # RelayBank attribute name
    position: str    # enum value to set

    def as_dict(self) -> dict:
        return {"action": "set", "field": self.field, "position": self.position}


@dataclass(frozen=True)
class Wait:
    seconds: float

    def as_dict(self) -> dict:
        return {"action": "wait", "seconds": self.seconds}


Action = Union[SetRelay, Wait]

_FIELD_ENUMS = {
    "relay4_load_source": LoadSource,
    "relay5_ups_source": LoadSource,
    "relay6_battery_path": BatteryPath,
    "external_dc_relay": ExternalRelay,
}


def target_bank(target: Target) -> RelayBank:
    if target is Target.BATTERY:
        return RelayBank.battery()
    if target is Target.GRID:
        return RelayBank.grid()
    if target is Target.EMERGENCY_OFF:
        return RelayBank.de_energized()
    raise ValueError(f"no bank configuration for target {target}")


def _set(field: str, position) -> SetRelay:
    return SetRelay(field, position.value)


def plan_transition(bank: RelayBank, goal: RelayBank) -> List[Action]:
    """Ordered actions taking `bank` to `goal`; empty when already there."""
    diffs = {
        field: getattr(goal, field)
        for field in _FIELD_ENUMS
        if getattr(bank, field) != getattr(goal, field)
    }
    if not diffs:
        return []

    closing = (
        "external_dc_relay" in diffs
        and goal.external_dc_relay is ExternalRelay.CLOSED
    )
    actions: List[Action] = []
    if closing:
        # battery path first so DC current has somewhere to go, settle,
        # make the link, then move the loads across
        if "relay6_battery_path" in diffs:
            actions.append(_set("relay6_battery_path", diffs["relay6_battery_path"]))
        actions.append(Wait(SETTLE_DELAY_S))
        actions.append(_set("external_dc_relay", diffs["external_dc_relay"]))
        for field in ("relay4_load_source", "relay5_ups_source"):
            if field in diffs:
                actions.append(_set(field, diffs[field]))
        return actions

    # opening or leaving the DC link alone: loads back to grid first,
    # break the link, then restore the charge path; nothing waits
    for field in ("relay4_load_source", "relay5_ups_source"):
        if field in diffs:
            actions.append(_set(field, diffs[field]))
    if "external_dc_relay" in diffs:
        actions.append(_set("external_dc_relay", diffs["external_dc_relay"]))
    if "relay6_battery_path" in diffs:
        actions.append(_set("relay6_battery_path", diffs["relay6_battery_path"]))
    return actions


def apply_decision(decision: Decision, bank: RelayBank) -> Tuple[List[Action], RelayBank]:
    """Plan the actions for a decision and return them with the bank
    they produce. Hold plans nothing."""
    if decision.target is Target.HOLD:
        return [], bank
    goal = target_bank(decision.target)
    return plan_transition(bank, goal), goal


def execute_actions(
    bank: RelayBank,
    actions: List[Action],
    sleep: Optional[Callable[[float], None]] = None,
) -> RelayBank:
    """Drive the bank through an action list, honoring waits via the
    provided sleep (ignored when None, as in simulation)."""
    for action in actions:
        if isinstance(action, Wait):
            if sleep is not None:
                sleep(action.seconds)
            continue
        enum_type = _FIELD_ENUMS[action.field]
        bank = replace(bank, **{action.field: enum_type(action.position)})
    return bank
