"""Deterministic plant simulation: battery, charger, inverter, grid,
and household load, producing codec-quantized meter readings."""

from dcmctl.plant.config import PlantConfig
from dcmctl.plant.battery import (
    BatteryState,
    BatteryStepResult,
    StepEvent,
    step_battery,
)
from dcmctl.plant.profiles import (
    HOUSEHOLD_HOURLY,
    make_load_profile,
    mean_power,
    value_at,
)
from dcmctl.plant.scenario import Scenario, load_scenario
from dcmctl.plant.sim import ElectricalReading, EnergyLedger, Plant, plant_step

__all__ = [
    "BatteryState",
    "BatteryStepResult",
    "ElectricalReading",
    "EnergyLedger",
    "HOUSEHOLD_HOURLY",
    "Plant",
    "PlantConfig",
    "Scenario",
    "StepEvent",
    "load_scenario",
    "make_load_profile",
    "mean_power",
    "plant_step",
    "step_battery",
    "value_at",
]
