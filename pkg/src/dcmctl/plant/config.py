"""Plant parameter block.

Electrical behavior that the simulation treats as configured fact
rather than emergent physics: conversion efficiencies, charger and
inverter ratings, the residual grid draw of the control electronics,
and the power factors each meter observes in each source mode.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PlantConfig:
    charge_efficiency: float = 0.95
    discharge_efficiency: float = 0.95
    charger_power: float = 600.0
    inverter_rating: float = 2000.0
    standby_grid_draw: float = 4.7
    load_pf: float = 0.965            # quantizes to 0.96, inside [0.95, 0.98]
    grid_pf_battery_mode: float = 0.45
    grid_pf_grid_mode: float = 0.75
    failover_latency: float = 2.0
    tick: float = 1.0
    nominal_voltage: float = 230.0
    frequency: float = 50.0
    noise_w: float = 0.0              # uniform +-noise on power, 0 = off
    nominal_capacity_wh: float = 5120.0
    usable_capacity_wh: float = 4608.0
    initial_soh: float = 100.0

    def __post_init__(self):
        for name in ("charge_efficiency", "discharge_efficiency"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"plant.{name} {v} outside (0, 1]")
        for name in (
            "charger_power",
            "inverter_rating",
            "standby_grid_draw",
            "noise_w",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"plant.{name} must be >= 0")
        for name in ("load_pf", "grid_pf_battery_mode", "grid_pf_grid_mode"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"plant.{name} {v} outside (0, 1]")
        if self.tick <= 0:
            raise ValueError("plant.tick must be > 0")
        if self.failover_latency <= 0:
            raise ValueError("plant.failover_latency must be > 0")
        if self.nominal_voltage <= 0 or self.frequency <= 0:
            raise ValueError("plant voltage and frequency must be > 0")
        if self.nominal_capacity_wh < 0:
            raise ValueError("plant.nominal_capacity_wh must be >= 0")
        if self.usable_capacity_wh > self.nominal_capacity_wh:
            raise ValueError("plant.usable_capacity_wh exceeds nominal capacity")
        if not 0 <= self.initial_soh <= 100:
            raise ValueError("plant.initial_soh outside [0, 100]")
