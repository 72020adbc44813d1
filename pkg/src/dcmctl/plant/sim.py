"""Plant simulation: meter readings and energy integration.

The Plant owns the battery state, the two meter accumulators, and an
energy ledger. Each tick has two phases that the runner calls in order:

    readings(t, bank)      what the meters show at instant t
    integrate(t, dt, bank) advance energies over [t, t+dt)

Readings go through the real wire codecs (encode then decode) so every
published value sits exactly on the meter's register grid.

The ledger is double-entry: everything that enters (grid import, store
drain) must come out as served load, standby draw, conversion losses,
or store gain. The residual is floating-point dust, which is what the
balance check asserts.

Grid outages can start and end inside a tick; integration splits the
tick at outage boundaries, so unserved load is accounted with sub-tick
resolution.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from dcmctl.control.types import RelayBank
from dcmctl.plant.battery import BatteryState, StepEvent, step_battery
from dcmctl.plant.profiles import value_at
from dcmctl.plant.scenario import Scenario
from dcmctl.protocols.modbus import (
    MeterSample,
    decode_pzem_response,
    encode_pzem_response,
)


@dataclass(frozen=True)
class ElectricalReading:
    voltage: float
    current: float
    active_power: float
    power_factor: float
    frequency: float
    energy: float
    timestamp: float

    def as_payload(self) -> dict:
        return {
            "t": self.timestamp,
            "v": self.voltage,
            "i": self.current,
            "p": self.active_power,
            "pf": self.power_factor,
            "f": self.frequency,
            "e": self.energy,
        }


@dataclass
class EnergyLedger:
    """All figures in Wh. grid_in + store_out must equal the sum of the
    right-hand side; the residual is rounding error only."""

    grid_in_wh: float = 0.0
    store_out_wh: float = 0.0
    store_in_wh: float = 0.0
    load_served_wh: float = 0.0
    load_unserved_wh: float = 0.0
    standby_wh: float = 0.0
    charger_loss_wh: float = 0.0
    inverter_loss_wh: float = 0.0
    unserved_intervals: List[Tuple[float, float]] = field(default_factory=list)

    @property
    def throughput_wh(self) -> float:
        return self.grid_in_wh + self.store_out_wh

    @property
    def residual_wh(self) -> float:
        outgo = (
            self.load_served_wh
            + self.standby_wh
            + self.charger_loss_wh
            + self.inverter_loss_wh
            + self.store_in_wh
        )
        return self.throughput_wh - outgo

    def balanced(self, rel: float = 0.001) -> bool:
        if self.throughput_wh == 0.0:
            return self.residual_wh == 0.0
        return abs(self.residual_wh) <= rel * self.throughput_wh

    def note_unserved(self, start: float, end: float) -> None:
        if end <= start:
            return
        if self.unserved_intervals and math.isclose(
            self.unserved_intervals[-1][1], start, abs_tol=1e-9
        ):
            s, _ = self.unserved_intervals[-1]
            self.unserved_intervals[-1] = (s, end)
        else:
            self.unserved_intervals.append((start, end))


def _quantize(sample: MeterSample) -> MeterSample:
    # round-trip through the wire format puts every field on its LSB grid
    return decode_pzem_response(encode_pzem_response(1, sample))


class Plant:
    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.cfg = scenario.plant
        self.battery = BatteryState.from_soc(scenario.initial_soc, scenario.plant)
        self.ledger = EnergyLedger()
        self.grid_meter_wh = 0.0
        self.load_meter_wh = 0.0
        self._rng = random.Random(scenario.seed)

    # -- instantaneous view -------------------------------------------------

    def load_at(self, t: float) -> float:
        return value_at(self.scenario.load_profile, t)

    def _noisy(self, power: float) -> float:
        if self.cfg.noise_w > 0 and power > 0:
            power = max(0.0, power + self._rng.uniform(-self.cfg.noise_w, self.cfg.noise_w))
        return power

    def _reading(self, t: float, power: float, pf: float, meter_wh: float) -> ElectricalReading:
        cfg = self.cfg
        power = self._noisy(power)
        live = power > 0
        voltage = cfg.nominal_voltage if live else 0.0
        freq = cfg.frequency if live else 0.0
        current = power / (voltage * pf) if live else 0.0
        sample = _quantize(
            MeterSample(
                voltage=voltage,
                current=current,
                power=power,
                energy=math.floor(meter_wh),
                frequency=freq,
                power_factor=pf if live else 0.0,
                alarm=False,
            )
        )
        return ElectricalReading(
            voltage=sample.voltage,
            current=sample.current,
            active_power=sample.power,
            power_factor=sample.power_factor,
            frequency=sample.frequency,
            energy=sample.energy,
            timestamp=t,
        )

    def readings(self, t: float, bank: RelayBank) -> Tuple[ElectricalReading, ElectricalReading]:
        """(grid, load) as the meters would report them at instant t."""
        if not 0 <= t < self.scenario.duration:
            raise ValueError(f"t={t} outside scenario [0, {self.scenario.duration})")
        cfg = self.cfg
        load_w = self.load_at(t)
        up = self.scenario.grid_up(t)
        battery_mode = bank.is_battery_mode

        if not up:
            grid = self._reading(t, 0.0, 0.0, self.grid_meter_wh)
        elif battery_mode:
            grid = self._reading(
                t, cfg.standby_grid_draw, cfg.grid_pf_battery_mode, self.grid_meter_wh
            )
        else:
            has_room = self.battery.stored_wh < self.battery.nominal_capacity
            charger = cfg.charger_power if has_room else 0.0
            grid = self._reading(
                t,
                load_w + charger + cfg.standby_grid_draw,
                cfg.grid_pf_grid_mode,
                self.grid_meter_wh,
            )

        if battery_mode:
            served = min(load_w, cfg.inverter_rating) if self.battery.stored_wh > 0 else 0.0
        else:
            served = load_w if up else 0.0
        load = self._reading(t, served, cfg.load_pf if served > 0 else 0.0, self.load_meter_wh)
        return grid, load

    # -- integration --------------------------------------------------------

    def _grid_pieces(self, t: float, dt: float):
        """Split [t, t+dt) at outage boundaries into (start, end, up)."""
        end = t + dt
        cuts = {t, end}
        for s, e in self.scenario.grid_outages:
            if s < end and e > t:
                cuts.add(max(s, t))
                cuts.add(min(e, end))
        points = sorted(cuts)
        for a, b in zip(points, points[1:]):
            yield a, b, self.scenario.grid_up((a + b) / 2.0)

    def integrate(self, t: float, dt: float, bank: RelayBank) -> List[StepEvent]:
        """Advance battery, meters, and ledger over [t, t+dt) with the
        bank held in its current position."""
        if not 0 <= t < self.scenario.duration:
            raise ValueError(f"t={t} outside scenario [0, {self.scenario.duration})")
        cfg = self.cfg
        led = self.ledger
        load_w = self.load_at(t)
        events: List[StepEvent] = []

        if bank.is_battery_mode:
            result = step_battery(self.battery, load_w, dt, cfg) if load_w > 0 else None
            if result is not None:
                self.battery = result.state
                events.extend(result.events)
                led.store_out_wh += result.dc_drained_wh
                led.load_served_wh += result.ac_delivered_wh
                led.inverter_loss_wh += result.dc_drained_wh - result.ac_delivered_wh
                self.load_meter_wh += result.ac_delivered_wh
                want_wh = load_w * dt / 3600.0
                short_wh = want_wh - result.ac_delivered_wh
                if short_wh > 1e-12:
                    led.load_unserved_wh += short_wh
                    led.note_unserved(t + dt * (1.0 - short_wh / want_wh), t + dt)
            else:
                # zero load: battery idles, keep reported current at zero
                result = step_battery(self.battery, 0.0, dt, cfg)
                self.battery = result.state
            # controller electronics stay on grid whenever it is up
            for a, b, up in self._grid_pieces(t, dt):
                if up:
                    wh = cfg.standby_grid_draw * (b - a) / 3600.0
                    led.grid_in_wh += wh
                    led.standby_wh += wh
                    self.grid_meter_wh += wh
            return events

        # grid mode: loads on grid, charger runs while grid is up and
        # the store has room; outage slices serve nothing
        for a, b, up in self._grid_pieces(t, dt):
            piece = b - a
            if not up:
                if load_w > 0:
                    led.load_unserved_wh += load_w * piece / 3600.0
                    led.note_unserved(a, b)
                idle = step_battery(self.battery, 0.0, piece, cfg)
                self.battery = idle.state
                continue
            served_wh = load_w * piece / 3600.0
            standby_wh = cfg.standby_grid_draw * piece / 3600.0
            result = step_battery(self.battery, -cfg.charger_power, piece, cfg)
            self.battery = result.state
            events.extend(result.events)
            led.grid_in_wh += served_wh + standby_wh + result.ac_absorbed_wh
            led.load_served_wh += served_wh
            led.standby_wh += standby_wh
            led.store_in_wh += result.dc_stored_wh
            led.charger_loss_wh += result.ac_absorbed_wh - result.dc_stored_wh
            self.grid_meter_wh += served_wh + standby_wh + result.ac_absorbed_wh
            self.load_meter_wh += served_wh
        return events


def plant_step(
    scenario: Scenario,
    t: float,
    relay_bank: RelayBank,
    battery: BatteryState,
    plant: Optional[Plant] = None,
) -> Tuple[ElectricalReading, ElectricalReading, BatteryState]:
    """One tick: readings at t, then integration over one tick period.

    Pass a persistent Plant to keep meter accumulators and the ledger
    across calls; otherwise a throwaway instance is used.
    """
    if plant is None:
        plant = Plant(scenario)
    plant.battery = battery
    grid, load = plant.readings(t, relay_bank)
    plant.integrate(t, scenario.plant.tick, relay_bank)
    return grid, load, plant.battery
