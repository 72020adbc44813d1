"""Time-of-use tariff schedule.

A schedule is a set of labeled windows that tile the 24-hour day with
no gaps or overlaps, plus the demand-charge parameters. Hours are
decimal wall-clock hours; a window [start, end) includes its start.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Tuple

LABELS = ("peak", "off_peak", "shoulder")


@dataclass(frozen=True)
class TariffWindow:
    start_hour: float
    end_hour: float
    rate: float          # currency per kWh
    label: str

    def __post_init__(self):
        if not 0 <= self.start_hour < self.end_hour <= 24:
            raise ValueError(
                f"window [{self.start_hour}, {self.end_hour}] not inside [0, 24]"
            )
        if self.rate < 0:
            raise ValueError(f"window rate {self.rate} must be >= 0")
        if self.label not in LABELS:
            raise ValueError(f"window label {self.label!r} not one of {LABELS}")

    def contains(self, hour: float) -> bool:
        return self.start_hour <= hour < self.end_hour


@dataclass(frozen=True)
class TariffSchedule:
    windows: Tuple[TariffWindow, ...]
    demand_rate: float = 15.0        # currency per kW of peak demand
    demand_interval_min: float = 15.0
    billing_period_days: float = 1.0

    def __post_init__(self):
        windows = tuple(sorted(self.windows, key=lambda w: w.start_hour))
        object.__setattr__(self, "windows", windows)
        if not windows:
            raise ValueError("tariff.windows is empty")
        if windows[0].start_hour != 0 or windows[-1].end_hour != 24:
            raise ValueError("tariff windows must cover the full day")
        for a, b in zip(windows, windows[1:]):
            if a.end_hour != b.start_hour:
                raise ValueError(
                    f"tariff windows gap or overlap at hour {a.end_hour}"
                )
        if self.demand_rate < 0:
            raise ValueError("tariff.demand_rate must be >= 0")
        if not 0 < self.demand_interval_min <= 24 * 60:
            raise ValueError("tariff.demand_interval_min outside (0, 1440]")

    def window_at(self, hour: float) -> TariffWindow:
        h = hour % 24.0
        for w in self.windows:
            if w.contains(h):
                return w
        raise ValueError(f"no window covers hour {hour}")  # unreachable once validated

    def rate_at(self, hour: float) -> float:
        return self.window_at(hour).rate

    def label_at(self, hour: float) -> str:
        return self.window_at(hour).label

    @classmethod
    def from_windows(cls, rows: Sequence[Tuple[float, float, float, str]], **kw) -> "TariffSchedule":
        return cls(windows=tuple(TariffWindow(*row) for row in rows), **kw)

    def as_dict(self) -> dict:
        return {
            "windows": [
                [w.start_hour, w.end_hour, w.rate, w.label] for w in self.windows
            ],
            "demand_rate": self.demand_rate,
            "demand_interval_min": self.demand_interval_min,
            "billing_period_days": self.billing_period_days,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TariffSchedule":
        return cls.from_windows(
            [tuple(row) for row in d["windows"]],
            demand_rate=float(d.get("demand_rate", 15.0)),
            demand_interval_min=float(d.get("demand_interval_min", 15.0)),
            billing_period_days=float(d.get("billing_period_days", 1.0)),
        )
