"""Tariff-driven arbitrage day simulation.

Dispatch rule, evaluated per step on the wall-clock tariff label:

    peak      discharge to serve load, limited by the inverter rating
              and by the store's usable window (nominal minus usable
              capacity is kept as a floor)
    off_peak  charge at charger_power until the store is full
    shoulder  idle

The battery power series is signed AC watts, positive discharging, so
net grid draw is base minus battery pointwise. The reference
configuration starts the day at noon with a full store: the evening
peak discharges through the inverter cap, the overnight off-peak window
refills, and the next morning's peak discharges again before the day
ends at noon.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from dcmctl.plant.battery import BatteryState
from dcmctl.plant.config import PlantConfig
from dcmctl.plant.profiles import Segment, make_load_profile, value_at
from dcmctl.tariff.analytics import demand_charge, energy_cost, flattening_metrics
from dcmctl.tariff.schedule import TariffSchedule

DAY_S = 86400.0


@dataclass
class DayResult:
    base_load_series: np.ndarray
    net_grid_series: np.ndarray
    battery_power_series: np.ndarray   # signed W, + discharge
    step_s: float
    start_hour: float
    discharged_peak_kwh: float
    charged_offpeak_kwh: float
    peak_demand_before_kw: float
    peak_demand_after_kw: float
    energy_cost_before: float
    energy_cost_after: float
    demand_charge_before: float
    demand_charge_after: float
    end_soc: float
    dc_drained_wh: float
    dc_stored_wh: float
    warnings: List[str] = field(default_factory=list)

    @property
    def metrics(self) -> dict:
        flat = flattening_metrics(self.base_load_series, self.net_grid_series)
        return {
            **flat,
            "peak_before_kw": self.peak_demand_before_kw,
            "peak_after_kw": self.peak_demand_after_kw,
            "demand_charge_before": self.demand_charge_before,
            "demand_charge_after": self.demand_charge_after,
            "energy_cost_before": self.energy_cost_before,
            "energy_cost_after": self.energy_cost_after,
        }

    def as_dict(self) -> dict:
        """Scalar summary; the per-step series stay out of it."""
        return {
            "discharged_peak_kwh": self.discharged_peak_kwh,
            "charged_offpeak_kwh": self.charged_offpeak_kwh,
            "end_soc": self.end_soc,
            "dc_drained_wh": self.dc_drained_wh,
            "dc_stored_wh": self.dc_stored_wh,
            "step_s": self.step_s,
            "start_hour": self.start_hour,
            "warnings": list(self.warnings),
            **self.metrics,
        }


def simulate_arbitrage(
    profile: Sequence[Segment],
    tariff: TariffSchedule,
    battery: BatteryState,
    plant: PlantConfig,
    start_hour: float = 0.0,
    step_s: float = 60.0,
) -> DayResult:
    if DAY_S % step_s != 0:
        raise ValueError("step_s must divide 24 hours")
    steps = int(DAY_S / step_s)
    h_per_step = step_s / 3600.0

    stored = battery.stored_wh
    nominal = battery.nominal_capacity
    floor = nominal - battery.usable_capacity
    warnings: List[str] = []

    base = np.empty(steps)
    batt = np.zeros(steps)
    discharged_ac = 0.0
    charged_ac = 0.0
    dc_drained = 0.0
    dc_stored = 0.0

    if plant.charger_power <= 0 and stored <= floor:
        warnings.append("store empty and charger rated 0 W: nothing to dispatch")

    for k in range(steps):
        t = k * step_s
        hour = (start_hour + t / 3600.0) % 24.0
        load = value_at(profile, t)
        base[k] = load
        label = tariff.label_at(hour)

        if label == "peak" and load > 0:
            ac = min(load, plant.inverter_rating)
            avail_dc = max(0.0, stored - floor)
            ac_wh = min(ac * h_per_step, avail_dc * plant.discharge_efficiency)
            if ac_wh < ac * h_per_step and "store floor reached during a peak window" not in warnings:
                warnings.append("store floor reached during a peak window")
            dc = ac_wh / plant.discharge_efficiency
            stored -= dc
            dc_drained += dc
            discharged_ac += ac_wh
            batt[k] = ac_wh / h_per_step
        elif label == "off_peak" and stored < nominal and plant.charger_power > 0:
            ac_wh = plant.charger_power * h_per_step
            gain = min(ac_wh * plant.charge_efficiency, nominal - stored)
            ac_wh = gain / plant.charge_efficiency
            stored += gain
            dc_stored += gain
            charged_ac += ac_wh
            batt[k] = -ac_wh / h_per_step

    net = base - batt

    return DayResult(
        base_load_series=base,
        net_grid_series=net,
        battery_power_series=batt,
        step_s=step_s,
        start_hour=start_hour,
        discharged_peak_kwh=discharged_ac / 1000.0,
        charged_offpeak_kwh=charged_ac / 1000.0,
        peak_demand_before_kw=float(base.max()) / 1000.0,
        peak_demand_after_kw=float(net.max()) / 1000.0,
        energy_cost_before=energy_cost(base, step_s, tariff, start_hour),
        energy_cost_after=energy_cost(net, step_s, tariff, start_hour),
        demand_charge_before=demand_charge(base, step_s, tariff),
        demand_charge_after=demand_charge(net, step_s, tariff),
        end_soc=(stored / nominal * 100.0) if nominal > 0 else 0.0,
        dc_drained_wh=dc_drained,
        dc_stored_wh=dc_stored,
        warnings=warnings,
    )


def reference_tariff() -> TariffSchedule:
    """Two peak windows (morning spike, evening block), overnight
    off-peak aligned with the pre-6 AM charging window, shoulder
    elsewhere."""
    return TariffSchedule.from_windows(
        [
            (0.0, 6.0, 0.12, "off_peak"),
            (6.0, 7.0, 0.25, "shoulder"),
            (7.0, 8.0, 0.45, "peak"),
            (8.0, 16.0, 0.25, "shoulder"),
            (16.0, 21.0, 0.45, "peak"),
            (21.0, 24.0, 0.25, "shoulder"),
        ],
        demand_rate=15.0,
        demand_interval_min=15.0,
    )


def reference_day() -> dict:
    """Configuration reproducing the published day figures: household
    shape around a 1300 W mean, day starting at noon with a full store,
    900 W inverter, 600 W charger, unity conversion efficiencies."""
    plant = PlantConfig(
        charge_efficiency=1.0,
        discharge_efficiency=1.0,
        charger_power=600.0,
        inverter_rating=900.0,
    )
    profile = make_load_profile(
        "household_day", mean_w=1300.0, duration=DAY_S, start_hour=12
    )
    battery = BatteryState.from_soc(100.0, plant)
    return {
        "profile": profile,
        "tariff": reference_tariff(),
        "battery": battery,
        "plant": plant,
        "start_hour": 12.0,
    }
