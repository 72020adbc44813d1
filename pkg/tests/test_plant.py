"""Plant model: battery energy accounting, load profiles, meter
readings on the wire-format grid, and the conservation ledger."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcmctl.control.types import RelayBank
from dcmctl.plant.battery import BatteryState, step_battery
from dcmctl.plant.config import PlantConfig
from dcmctl.plant.profiles import (
    HOUSEHOLD_HOURLY,
    make_load_profile,
    mean_power,
    value_at,
)
from dcmctl.plant.scenario import Scenario
from dcmctl.plant.sim import Plant, plant_step

CFG = PlantConfig()


def battery_at(soc: float, cfg: PlantConfig = CFG) -> BatteryState:
    return BatteryState.from_soc(soc, cfg)


class TestBattery:
    def test_charge_hour_at_unity_efficiency(self):
        cfg = PlantConfig(charge_efficiency=1.0)
        state = battery_at(50.0, cfg)
        result = step_battery(state, -512.0, 3600.0, cfg)
        assert result.state.soc == pytest.approx(60.0)
        assert result.dc_stored_wh == pytest.approx(512.0)

    def test_charge_banks_efficiency_fraction(self):
        state = battery_at(50.0)
        result = step_battery(state, -600.0, 3600.0, CFG)
        assert result.ac_absorbed_wh == pytest.approx(600.0)
        assert result.dc_stored_wh == pytest.approx(570.0)

    def test_discharge_costs_efficiency_fraction(self):
        state = battery_at(50.0)
        result = step_battery(state, 950.0, 3600.0, CFG)
        assert result.ac_delivered_wh == pytest.approx(950.0)
        assert result.dc_drained_wh == pytest.approx(1000.0)

    def test_inverter_clamp_event(self):
        state = battery_at(80.0)
        result = step_battery(state, 2500.0, 60.0, CFG)
        assert any(e.kind == "inverter_clamp" for e in result.events)
        assert result.ac_delivered_wh == pytest.approx(CFG.inverter_rating * 60 / 3600)

    def test_full_charge_backs_off(self):
        state = battery_at(100.0)
        result = step_battery(state, -600.0, 3600.0, CFG)
        assert result.dc_stored_wh == 0.0
        assert result.state.soc == 100.0
        # charger has nowhere to put energy: draws nothing
        assert result.ac_absorbed_wh == 0.0

    def test_drain_to_empty_sets_under_voltage(self):
        cfg = PlantConfig(discharge_efficiency=1.0)
        state = battery_at(1.0, cfg)   # 51.2 Wh
        result = step_battery(state, 1000.0, 3600.0, cfg)
        assert result.state.stored_wh == 0.0
        assert "under_voltage" in result.state.alarms
        assert any(e.kind == "under_voltage" for e in result.events)
        # delivery cut short: only what the store held
        assert result.ac_delivered_wh == pytest.approx(51.2)

    def test_under_voltage_clears_on_recharge(self):
        cfg = PlantConfig(charge_efficiency=1.0)
        state = BatteryState(
            stored_wh=0.0, alarms=frozenset({"under_voltage"})
        )
        # 5% of 5120 is 256 Wh; charge past it
        result = step_battery(state, -600.0, 3600.0, cfg)
        assert result.state.soc >= 5.0
        assert "under_voltage" not in result.state.alarms

    def test_usable_floor_event_fires_once_on_crossing(self):
        cfg = PlantConfig(discharge_efficiency=1.0)
        # floor at 5120-4608 = 512 Wh; start just above
        state = BatteryState(stored_wh=520.0)
        result = step_battery(state, 600.0, 60.0, cfg)
        assert any(e.kind == "usable_floor" for e in result.events)
        again = step_battery(result.state, 600.0, 60.0, cfg)
        assert not any(e.kind == "usable_floor" for e in again.events)

    def test_pack_voltage_curve(self):
        assert battery_at(0.0).pack_voltage == pytest.approx(48.0)
        assert battery_at(50.0).pack_voltage == pytest.approx(51.2)
        assert battery_at(100.0).pack_voltage == pytest.approx(54.4)

    def test_pack_current_sign_follows_flow(self):
        discharge = step_battery(battery_at(50.0), 512.0, 3600.0, CFG)
        charge = step_battery(battery_at(50.0), -512.0, 3600.0, CFG)
        idle = step_battery(battery_at(50.0), 0.0, 3600.0, CFG)
        assert discharge.state.pack_current > 0
        assert charge.state.pack_current < 0
        assert idle.state.pack_current == 0.0

    def test_soc_stays_in_range(self):
        rng = random.Random(5)
        state = battery_at(50.0)
        for _ in range(500):
            power = rng.uniform(-3000, 3000)
            state = step_battery(state, power, 60.0, CFG).state
            assert 0.0 <= state.soc <= 100.0

    @given(
        soc=st.floats(0, 100),
        power=st.floats(-2000, 2000),
        dt=st.floats(0.1, 3600),
    )
    @settings(max_examples=200, deadline=None)
    def test_store_accounting_is_exact(self, soc, power, dt):
        state = battery_at(soc)
        result = step_battery(state, power, dt, CFG)
        delta = result.state.stored_wh - state.stored_wh
        assert delta == pytest.approx(result.dc_stored_wh - result.dc_drained_wh, abs=1e-9)
        assert result.ac_delivered_wh <= result.dc_drained_wh + 1e-12
        assert result.dc_stored_wh <= result.ac_absorbed_wh + 1e-12


class TestProfiles:
    def test_flat_profile_daily_energy(self):
        profile = make_load_profile("flat", watts=1300.0)
        assert mean_power(profile, 86400.0) == pytest.approx(1300.0)
        # 1300 W for 24 h is 31.2 kWh
        assert mean_power(profile, 86400.0) * 24 / 1000 == pytest.approx(31.2)

    def test_household_mean_is_exact(self):
        profile = make_load_profile("household_day", mean_w=1300.0)
        assert mean_power(profile, 86400.0) == pytest.approx(1300.0, abs=1e-9)

    def test_household_multipliers_sum_to_24(self):
        assert sum(HOUSEHOLD_HOURLY) == pytest.approx(24.0, abs=1e-12)

    def test_household_evening_peak(self):
        profile = make_load_profile("household_day", mean_w=1000.0)
        assert value_at(profile, 18.5 * 3600) == pytest.approx(2100.0)
        assert value_at(profile, 3 * 3600) == pytest.approx(350.0)

    def test_household_start_hour_rotates(self):
        profile = make_load_profile("household_day", mean_w=1000.0, start_hour=12)
        # t=0 is noon
        assert value_at(profile, 0.0) == pytest.approx(1000.0 * HOUSEHOLD_HOURLY[12])
        assert value_at(profile, 6.5 * 3600) == pytest.approx(1000.0 * HOUSEHOLD_HOURLY[18])

    def test_custom_profile_steps(self):
        profile = make_load_profile("custom", steps=[(0, 100), (60, 900)])
        assert value_at(profile, 59.9) == 100.0
        assert value_at(profile, 60.0) == 900.0

    def test_custom_validation(self):
        with pytest.raises(ValueError):
            make_load_profile("custom", steps=[(10, 100)])
        with pytest.raises(ValueError):
            make_load_profile("custom", steps=[(0, 100), (0, 200)])
        with pytest.raises(ValueError):
            make_load_profile("custom", steps=[(0, -5)])

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            make_load_profile("sinusoid")


def scenario_flat(watts=700.0, duration=3600.0, **kw) -> Scenario:
    defaults = dict(
        duration=duration,
        load_profile=make_load_profile("flat", watts=watts),
        initial_soc=80.0,
        plant=PlantConfig(),
        seed=1,
        start_hour=12,
    )
    defaults.update(kw)
    return Scenario(**defaults)


class TestReadings:
    def test_battery_mode_grid_draw(self):
        plant = Plant(scenario_flat())
        grid, load = plant.readings(0.0, RelayBank.battery())
        assert grid.active_power == pytest.approx(4.7, abs=0.1)
        assert grid.power_factor == pytest.approx(0.45)
        assert load.active_power == pytest.approx(700.0, abs=0.1)
        assert 0.95 <= load.power_factor <= 0.98

    def test_grid_mode_includes_charger_and_standby(self):
        plant = Plant(scenario_flat())
        grid, load = plant.readings(0.0, RelayBank.grid())
        assert grid.active_power == pytest.approx(700 + 600 + 4.7, abs=0.1)
        assert grid.power_factor == pytest.approx(0.75)
        assert load.active_power == pytest.approx(700.0, abs=0.1)

    def test_grid_mode_full_battery_skips_charger(self):
        plant = Plant(scenario_flat(initial_soc=100.0))
        grid, _ = plant.readings(0.0, RelayBank.grid())
        assert grid.active_power == pytest.approx(700 + 4.7, abs=0.1)

    def test_outage_zeroes_grid_reading(self):
        sc = scenario_flat(grid_outages=((10.0, 20.0),))
        plant = Plant(sc)
        grid, load = plant.readings(15.0, RelayBank.grid())
        assert grid.active_power == 0.0
        assert grid.voltage == 0.0
        assert grid.power_factor == 0.0
        # nothing feeds the loads either
        assert load.active_power == 0.0

    def test_outage_keeps_serving_in_battery_mode(self):
        sc = scenario_flat(grid_outages=((10.0, 20.0),))
        plant = Plant(sc)
        grid, load = plant.readings(15.0, RelayBank.battery())
        assert grid.active_power == 0.0
        assert load.active_power == pytest.approx(700.0, abs=0.1)

    def test_quantization_lands_on_register_grid(self):
        plant = Plant(scenario_flat(watts=712.34))
        _, load = plant.readings(0.0, RelayBank.battery())
        # power LSB is 0.1 W
        assert load.active_power * 10 == pytest.approx(round(load.active_power * 10))
        assert load.power_factor * 100 == pytest.approx(round(load.power_factor * 100))

    def test_noise_is_seeded_and_bounded(self):
        sc1 = scenario_flat(plant=PlantConfig(noise_w=10.0), seed=9)
        sc2 = scenario_flat(plant=PlantConfig(noise_w=10.0), seed=9)
        p1, p2 = Plant(sc1), Plant(sc2)
        r1 = [p1.readings(float(t), RelayBank.battery())[1].active_power for t in range(20)]
        r2 = [p2.readings(float(t), RelayBank.battery())[1].active_power for t in range(20)]
        assert r1 == r2
        assert all(abs(v - 700.0) <= 10.1 for v in r1)

    def test_energy_counter_is_monotonic(self):
        plant = Plant(scenario_flat())
        last = -1.0
        for t in range(0, 600, 60):
            plant.integrate(float(t), 60.0, RelayBank.battery())
            _, load = plant.readings(float(t) + 60 if t < 540 else 599.0, RelayBank.battery())
            assert load.energy >= last
            last = load.energy


class TestConservation:
    def test_unity_efficiency_is_exact(self):
        cfg = PlantConfig(charge_efficiency=1.0, discharge_efficiency=1.0)
        sc = scenario_flat(plant=cfg, duration=7200.0)
        plant = Plant(sc)
        for t in range(0, 3600):
            plant.integrate(float(t), 1.0, RelayBank.battery())
        for t in range(3600, 7200):
            plant.integrate(float(t), 1.0, RelayBank.grid())
        led = plant.ledger
        assert abs(led.residual_wh) < 1e-6
        assert led.inverter_loss_wh == pytest.approx(0.0, abs=1e-9)
        assert led.charger_loss_wh == pytest.approx(0.0, abs=1e-9)

    def test_ledger_balances_through_mode_churn(self):
        sc = scenario_flat(duration=3600.0)
        plant = Plant(sc)
        rng = random.Random(2)
        bank = RelayBank.grid()
        for t in range(3600):
            if rng.random() < 0.01:
                bank = RelayBank.battery() if bank == RelayBank.grid() else RelayBank.grid()
            plant.integrate(float(t), 1.0, bank)
        assert plant.ledger.balanced(rel=0.001)

    def test_random_scenarios_balance(self):
        rng = random.Random(7)
        for trial in range(5):
            outage_start = rng.uniform(100, 500)
            sc = Scenario(
                duration=900.0,
                load_profile=make_load_profile(
                    "custom",
                    steps=[(0, rng.uniform(0, 2000)), (300, rng.uniform(0, 2000))],
                ),
                grid_outages=((outage_start, outage_start + rng.uniform(10, 120)),),
                initial_soc=rng.uniform(5, 100),
                plant=PlantConfig(),
                seed=trial,
                start_hour=rng.randrange(24),
            )
            plant = Plant(sc)
            bank = RelayBank.grid()
            for t in range(900):
                if rng.random() < 0.02:
                    bank = (
                        RelayBank.battery()
                        if bank == RelayBank.grid()
                        else RelayBank.grid()
                    )
                plant.integrate(float(t), 1.0, bank)
            assert plant.ledger.balanced(rel=0.001), f"trial {trial}"
            assert 0.0 <= plant.battery.soc <= 100.0

    def test_outage_splits_inside_tick(self):
        # outage covering [10.3, 10.7) inside the tick starting at 10
        sc = scenario_flat(grid_outages=((10.3, 10.7),), duration=60.0)
        plant = Plant(sc)
        for t in range(60):
            plant.integrate(float(t), 1.0, RelayBank.grid())
        led = plant.ledger
        assert led.load_unserved_wh == pytest.approx(700.0 * 0.4 / 3600.0)
        assert led.unserved_intervals == [(10.3, 10.7)]

    def test_unserved_interval_merging(self):
        sc = scenario_flat(grid_outages=((10.0, 12.0),), duration=60.0)
        plant = Plant(sc)
        for t in range(60):
            plant.integrate(float(t), 1.0, RelayBank.grid())
        # consecutive unserved ticks merge into one interval
        assert plant.ledger.unserved_intervals == [(10.0, 12.0)]


class TestPlantStep:
    def test_single_call_contract(self):
        sc = scenario_flat()
        battery = BatteryState.from_soc(80.0, sc.plant)
        grid, load, after = plant_step(sc, 0.0, RelayBank.battery(), battery)
        assert load.active_power == pytest.approx(700.0, abs=0.1)
        assert after.stored_wh < battery.stored_wh

    def test_rejects_time_outside_scenario(self):
        sc = scenario_flat(duration=100.0)
        plant = Plant(sc)
        with pytest.raises(ValueError):
            plant.readings(100.0, RelayBank.grid())
        with pytest.raises(ValueError):
            plant.integrate(-1.0, 1.0, RelayBank.grid())


class TestScenario:
    def test_outage_validation(self):
        with pytest.raises(ValueError):
            scenario_flat(grid_outages=((50.0, 40.0),))
        with pytest.raises(ValueError):
            scenario_flat(grid_outages=((0.0, 10.0), (5.0, 20.0)))
        with pytest.raises(ValueError):
            scenario_flat(grid_outages=((0.0, 999999.0),))

    def test_hour_of_day_wraps(self):
        sc = scenario_flat(duration=200000.0, start_hour=22)
        assert sc.hour_of_day(0.0) == 22
        assert sc.hour_of_day(2 * 3600.0) == 0
        assert sc.hour_of_day(26 * 3600.0) == 0

    def test_from_dict_round_trip(self):
        sc = Scenario.from_dict(
            {
                "duration": 600,
                "start_hour": 12,
                "initial_soc": 85,
                "load_profile": {"kind": "household_day", "mean_w": 1000},
                "grid_outages": [[10, 20]],
                "plant": {"charger_power": 500},
            }
        )
        assert sc.plant.charger_power == 500.0
        assert sc.grid_outages == ((10.0, 20.0),)
        # profile inherited the scenario clock
        assert value_at(sc.load_profile, 0.0) == pytest.approx(1000 * HOUSEHOLD_HOURLY[12])

    def test_zero_capacity_battery_is_legal(self):
        cfg = PlantConfig(nominal_capacity_wh=0.0, usable_capacity_wh=0.0)
        state = BatteryState.from_soc(50.0, cfg)
        assert state.soc == 0.0
        result = step_battery(state, 500.0, 60.0, cfg)
        assert result.ac_delivered_wh == 0.0
