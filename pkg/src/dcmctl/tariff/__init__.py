"""TOU tariffs, demand-charge billing, arbitrage dispatch, and
backup-runtime calculators."""

from dcmctl.tariff.schedule import TariffSchedule, TariffWindow
from dcmctl.tariff.analytics import (
    backup_runtime,
    demand_charge,
    energy_cost,
    flattening_metrics,
)
from dcmctl.tariff.arbitrage import (
    DayResult,
    reference_day,
    reference_tariff,
    simulate_arbitrage,
)

__all__ = [
    "DayResult",
    "TariffSchedule",
    "TariffWindow",
    "backup_runtime",
    "demand_charge",
    "energy_cost",
    "flattening_metrics",
    "reference_day",
    "reference_tariff",
    "simulate_arbitrage",
]
