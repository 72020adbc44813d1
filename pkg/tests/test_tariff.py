"""Tariff math: schedules, demand charges, backup runtime, and the
arbitrage day with its frozen reference figures."""

import numpy as np
import pytest

from dcmctl.plant.battery import BatteryState
from dcmctl.plant.config import PlantConfig
from dcmctl.plant.profiles import make_load_profile
from dcmctl.tariff.analytics import (
    backup_runtime,
    demand_charge,
    energy_cost,
    flattening_metrics,
)
from dcmctl.tariff.arbitrage import reference_day, reference_tariff, simulate_arbitrage
from dcmctl.tariff.schedule import TariffSchedule, TariffWindow


class TestSchedule:
    def test_must_tile_the_day(self):
        with pytest.raises(ValueError):
            TariffSchedule(windows=(TariffWindow(0, 20, 0.1, "a"),))
        with pytest.raises(ValueError):
            TariffSchedule(
                windows=(
                    TariffWindow(0, 10, 0.1, "a"),
                    TariffWindow(11, 24, 0.2, "b"),   # hour 10-11 uncovered
                )
            )
        with pytest.raises(ValueError):
            TariffSchedule(
                windows=(
                    TariffWindow(0, 12, 0.1, "a"),
                    TariffWindow(10, 24, 0.2, "b"),   # overlap
                )
            )

    def test_lookup_and_wrap(self):
        t = reference_tariff()
        assert t.label_at(3.0) == "off_peak"
        assert t.label_at(7.5) == "peak"
        assert t.label_at(12.0) == "shoulder"
        assert t.label_at(20.99) == "peak"
        assert t.label_at(21.0) == "shoulder"
        # wraps modulo 24
        assert t.label_at(27.0) == "off_peak"
        assert t.rate_at(3.0) == pytest.approx(0.12)
        assert t.rate_at(18.0) == pytest.approx(0.45)

    def test_window_bounds_validation(self):
        with pytest.raises(ValueError):
            TariffWindow(5, 5, 0.1, "empty")
        with pytest.raises(ValueError):
            TariffWindow(0, 25, 0.1, "too long")
        with pytest.raises(ValueError):
            TariffWindow(0, 6, -0.1, "negative rate")

    def test_round_trip_dict(self):
        t = reference_tariff()
        clone = TariffSchedule.from_dict(t.as_dict())
        assert clone == t


class TestDemandCharge:
    def test_quarter_hour_spike_sets_the_charge(self):
        # 1 kW baseline for a day, one aligned 15-min window at 3.33 kW:
        # window mean 3.33 kW, rate 15 -> charge 50.0 (next to 15.0 flat)
        dt = 60.0
        series = np.full(1440, 1000.0)
        series[600:615] = 10000.0 / 3.0
        t = reference_tariff()
        assert demand_charge(series, dt, t) == pytest.approx(50.0)
        assert demand_charge(np.full(1440, 1000.0), dt, t) == pytest.approx(15.0)

    def test_interval_average_not_instantaneous_peak(self):
        # a 1-min 15 kW blip averages to 1.933 kW over its window
        series = np.full(1440, 1000.0)
        series[0] = 15000.0
        t = reference_tariff()
        expected = (15000 + 14 * 1000) / 15 / 1000 * 15.0
        assert demand_charge(series, 60.0, t) == pytest.approx(expected)

    def test_rejects_empty_and_partial_windows(self):
        t = reference_tariff()
        with pytest.raises(ValueError):
            demand_charge([], 60.0, t)
        with pytest.raises(ValueError):
            demand_charge([1000.0] * 10, 60.0, t)   # shorter than one window


class TestEnergyCost:
    def test_flat_day_uses_every_window(self):
        t = reference_tariff()
        # 1 kW flat: 6h at 0.12 + 6h at 0.45 + 12h at 0.25
        expected = 6 * 0.12 + 6 * 0.45 + 12 * 0.25
        series = np.full(1440, 1000.0)
        assert energy_cost(series, 60.0, t) == pytest.approx(expected)

    def test_start_hour_offset(self):
        t = reference_tariff()
        # one hour starting at 3 AM: off-peak rate
        series = np.full(60, 1000.0)
        assert energy_cost(series, 60.0, t, start_hour=3) == pytest.approx(0.12)
        assert energy_cost(series, 60.0, t, start_hour=18) == pytest.approx(0.45)


class TestBackupRuntime:
    def test_full_store_reference_load(self):
        assert backup_runtime(5120.0, 1300.0) == pytest.approx(3.9385, abs=0.05)

    def test_amp_hour_style_figures(self):
        # 37 Ah at 51.2 V nominal vs an 8.5 A draw: 4.35 h
        capacity_wh = 37.0 * 51.2
        load_w = 8.5 * 51.2
        assert backup_runtime(capacity_wh, load_w) == pytest.approx(4.3529, abs=0.05)

    def test_zero_capacity(self):
        assert backup_runtime(0.0, 500.0) == 0.0

    def test_rejects_nonpositive_load(self):
        with pytest.raises(ValueError):
            backup_runtime(5120.0, 0.0)
        with pytest.raises(ValueError):
            backup_runtime(5120.0, -10.0)


class TestFlatteningMetrics:
    def test_identity_when_nothing_changes(self):
        base = np.array([1000.0, 2000.0, 1500.0, 500.0])
        m = flattening_metrics(base, base.copy())
        assert m["peak_reduction_w"] == 0.0
        assert m["variance_ratio"] == pytest.approx(1.0)
        assert m["load_factor_before"] == m["load_factor_after"]

    def test_perfect_flattening(self):
        base = np.array([500.0, 1500.0])
        net = np.array([1000.0, 1000.0])
        m = flattening_metrics(base, net)
        assert m["variance_ratio"] == 0.0
        assert m["peak_reduction_w"] == pytest.approx(500.0)
        assert m["load_factor_after"] == pytest.approx(1.0)

    def test_constant_base_defines_ratio_one(self):
        base = np.full(10, 800.0)
        m = flattening_metrics(base, base.copy())
        assert m["variance_ratio"] == 1.0


@pytest.fixture(scope="module")
def result():
    day = reference_day()
    return simulate_arbitrage(
        day["profile"], day["tariff"], day["battery"], day["plant"],
        start_hour=day["start_hour"],
    )


class TestArbitrageDay:
    def test_peak_discharge_total(self, result):
        assert result.discharged_peak_kwh == pytest.approx(5.4, abs=0.1)

    def test_offpeak_recharge_total(self, result):
        assert result.charged_offpeak_kwh == pytest.approx(3.6, abs=0.1)

    def test_end_soc(self, result):
        # 5120 - 5400 + 3600 ... clipped by floor/full: lands at 3320 Wh
        assert result.end_soc == pytest.approx(64.84375, abs=1e-6)

    def test_demand_peaks(self, result):
        assert result.peak_demand_before_kw == pytest.approx(2.730, abs=1e-9)
        assert result.peak_demand_after_kw == pytest.approx(1.830, abs=1e-9)

    def test_flattening_golden_figures(self, result):
        m = result.metrics
        assert m["peak_reduction_w"] == pytest.approx(900.0, abs=1e-9)
        assert m["variance_ratio"] == pytest.approx(0.1588, abs=5e-4)
        assert m["variance_ratio"] < 1.0
        assert m["load_factor_before"] == pytest.approx(0.4762, abs=5e-4)
        assert m["load_factor_after"] == pytest.approx(0.6694, abs=5e-4)

    def test_demand_charge_savings(self, result):
        assert result.demand_charge_before == pytest.approx(40.95, abs=0.01)
        assert result.demand_charge_after == pytest.approx(27.45, abs=0.01)

    def test_energy_cost_savings(self, result):
        assert result.energy_cost_before == pytest.approx(10.0808, abs=5e-4)
        assert result.energy_cost_after == pytest.approx(8.0829, abs=5e-4)
        assert result.energy_cost_after < result.energy_cost_before

    def test_no_warnings_on_reference_day(self, result):
        assert result.warnings == []

    def test_store_delta_matches_flows(self, result):
        # unity efficiencies: store delta is exactly stored minus drained
        day = reference_day()
        start_wh = day["battery"].stored_wh
        end_wh = result.end_soc / 100.0 * day["battery"].nominal_capacity
        assert end_wh - start_wh == pytest.approx(
            result.dc_stored_wh - result.dc_drained_wh, abs=1e-6
        )

    def test_battery_series_respects_inverter_cap(self, result):
        assert float(result.battery_power_series.max()) <= 900.0 + 1e-9

    def test_net_is_base_minus_battery(self, result):
        assert np.allclose(
            result.net_grid_series,
            result.base_load_series - result.battery_power_series,
        )


class TestArbitrageEdges:
    def test_zero_capacity_store_changes_nothing(self):
        plant = PlantConfig(
            nominal_capacity_wh=0.0, usable_capacity_wh=0.0,
            charge_efficiency=1.0, discharge_efficiency=1.0,
        )
        battery = BatteryState.from_soc(0.0, plant)
        profile = make_load_profile("household_day", mean_w=1300.0, start_hour=12)
        r = simulate_arbitrage(profile, reference_tariff(), battery, plant, start_hour=12)
        assert np.array_equal(r.net_grid_series, r.base_load_series)
        assert r.discharged_peak_kwh == 0.0

    def test_no_peak_windows_moves_nothing(self):
        tariff = TariffSchedule.from_windows(
            [(0, 24, 0.2, "shoulder")], demand_rate=15.0
        )
        day = reference_day()
        r = simulate_arbitrage(day["profile"], tariff, day["battery"], day["plant"])
        assert r.discharged_peak_kwh == 0.0
        assert r.charged_offpeak_kwh == 0.0

    def test_zero_charger_never_recharges(self):
        plant = PlantConfig(
            charger_power=0.0, inverter_rating=900.0,
            charge_efficiency=1.0, discharge_efficiency=1.0,
        )
        day = reference_day()
        battery = BatteryState.from_soc(100.0, plant)
        r = simulate_arbitrage(day["profile"], day["tariff"], battery, plant,
                               start_hour=12)
        assert r.charged_offpeak_kwh == 0.0
        assert r.discharged_peak_kwh > 0.0

    def test_empty_store_and_no_charger_warns(self):
        plant = PlantConfig(
            charger_power=0.0, nominal_capacity_wh=5120.0,
            usable_capacity_wh=4608.0,
        )
        battery = BatteryState(stored_wh=512.0)   # exactly at floor
        day = reference_day()
        r = simulate_arbitrage(day["profile"], day["tariff"], battery, plant)
        assert any("nothing to dispatch" in w for w in r.warnings)

    def test_floor_reached_warning(self):
        # tiny store drains mid-peak
        plant = PlantConfig(
            nominal_capacity_wh=200.0, usable_capacity_wh=200.0,
            charge_efficiency=1.0, discharge_efficiency=1.0,
            inverter_rating=900.0,
        )
        battery = BatteryState.from_soc(100.0, plant)
        battery = BatteryState(
            stored_wh=200.0, nominal_capacity=200.0, usable_capacity=200.0
        )
        day = reference_day()
        r = simulate_arbitrage(day["profile"], day["tariff"], battery, plant,
                               start_hour=12)
        assert any("floor" in w for w in r.warnings)

    def test_step_must_divide_day(self):
        day = reference_day()
        with pytest.raises(ValueError):
            simulate_arbitrage(day["profile"], day["tariff"], day["battery"],
                               day["plant"], step_s=7.0)
