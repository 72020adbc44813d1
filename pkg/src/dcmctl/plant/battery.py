"""Coulomb-counting battery model.

Stored energy is the source of truth; SoC, pack voltage, and the BMS
alarm set derive from it. Power at the battery terminals is signed the
way the BMS signs current: positive discharges, negative charges.
Discharge is quoted AC-side (what the inverter delivers) and costs
power/discharge_efficiency from the store; charge is quoted AC-side
(what the charger draws) and banks power*charge_efficiency.

Limits saturate rather than raise: the inverter rating caps discharge,
an empty store cuts delivery short within the step, a full store backs
the charger off. Every saturation is reported as an event so callers
can account for the shortfall.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import List, Tuple

from dcmctl.plant.config import PlantConfig

CELLS_IN_SERIES = 16
CELL_VOLTAGE_EMPTY = 3.0
CELL_VOLTAGE_SPAN = 0.4   # linear to 3.4 V at full; 3.2 V nominal at 50%

UNDER_VOLTAGE_CLEAR_SOC = 5.0


@dataclass(frozen=True)
class BatteryState:
    stored_wh: float
    nominal_capacity: float = 5120.0
    usable_capacity: float = 4608.0
    soh: float = 100.0
    temperature: float = 25.0
    pack_current: float = 0.0          # amps, + discharge
    alarms: frozenset = frozenset()

    @classmethod
    def from_soc(cls, soc: float, cfg: PlantConfig) -> "BatteryState":
        if not 0 <= soc <= 100:
            raise ValueError(f"soc {soc} outside [0, 100]")
        return cls(
            stored_wh=soc / 100.0 * cfg.nominal_capacity_wh,
            nominal_capacity=cfg.nominal_capacity_wh,
            usable_capacity=cfg.usable_capacity_wh,
            soh=cfg.initial_soh,
        )

    @property
    def soc(self) -> float:
        if self.nominal_capacity <= 0:
            return 0.0
        return min(100.0, max(0.0, self.stored_wh / self.nominal_capacity * 100.0))

    @property
    def pack_voltage(self) -> float:
        return CELLS_IN_SERIES * (CELL_VOLTAGE_EMPTY + CELL_VOLTAGE_SPAN * self.soc / 100.0)


@dataclass(frozen=True)
class StepEvent:
    kind: str       # inverter_clamp | under_voltage | usable_floor | battery_full
    detail: str = ""


@dataclass
class BatteryStepResult:
    state: BatteryState
    events: List[StepEvent] = field(default_factory=list)
    # energy split over the step, all in Wh
    ac_delivered_wh: float = 0.0   # AC energy the inverter actually supplied
    dc_drained_wh: float = 0.0     # energy that left the store
    ac_absorbed_wh: float = 0.0    # AC energy the charger actually drew
    dc_stored_wh: float = 0.0      # energy that entered the store


def step_battery(
    state: BatteryState, power: float, dt: float, cfg: PlantConfig
) -> BatteryStepResult:
    """Advance the store by dt seconds at the given signed AC power."""
    if dt <= 0:
        raise ValueError("dt must be > 0")

    events: List[StepEvent] = []
    stored = state.stored_wh
    floor_wh = state.nominal_capacity - state.usable_capacity
    crossed_floor_before = stored <= floor_wh

    ac_delivered = dc_drained = ac_absorbed = dc_stored = 0.0

    if power > 0:
        ac_power = power
        if ac_power > cfg.inverter_rating:
            events.append(StepEvent("inverter_clamp", f"requested {ac_power:.0f} W"))
            ac_power = cfg.inverter_rating
        ac_wanted_wh = ac_power * dt / 3600.0
        dc_wanted_wh = ac_wanted_wh / cfg.discharge_efficiency
        if dc_wanted_wh >= stored:
            dc_drained = stored
            ac_delivered = stored * cfg.discharge_efficiency
            stored = 0.0
            events.append(StepEvent("under_voltage", "store exhausted"))
        else:
            dc_drained = dc_wanted_wh
            ac_delivered = ac_wanted_wh
            stored -= dc_wanted_wh

    elif power < 0:
        ac_power = -power
        ac_wanted_wh = ac_power * dt / 3600.0
        gain_wh = ac_wanted_wh * cfg.charge_efficiency
        room = state.nominal_capacity - stored
        if gain_wh >= room and room >= 0:
            dc_stored = room
            ac_absorbed = room / cfg.charge_efficiency
            stored = state.nominal_capacity
            if gain_wh > room:
                events.append(StepEvent("battery_full", "charger backed off"))
        else:
            dc_stored = gain_wh
            ac_absorbed = ac_wanted_wh
            stored += gain_wh

    # DC current averaged over the step from the energy that actually moved
    pack_current = (dc_drained - dc_stored) * 3600.0 / dt / state.pack_voltage

    if not crossed_floor_before and stored <= floor_wh:
        events.append(StepEvent("usable_floor", f"{state.usable_capacity:.0f} Wh drained"))

    alarms = set(state.alarms)
    if stored <= 0.0:
        alarms.add("under_voltage")
    elif stored / state.nominal_capacity * 100.0 >= UNDER_VOLTAGE_CLEAR_SOC:
        alarms.discard("under_voltage")

    new_state = replace(
        state,
        stored_wh=stored,
        pack_current=pack_current,
        alarms=frozenset(alarms),
    )
    return BatteryStepResult(
        state=new_state,
        events=events,
        ac_delivered_wh=ac_delivered,
        dc_drained_wh=dc_drained,
        ac_absorbed_wh=ac_absorbed,
        dc_stored_wh=dc_stored,
    )
