"""Scenario: one fully determined simulated run.

JSON layout (all plant keys optional, defaults from PlantConfig):

    {
      "duration": 86400,
      "start_hour": 0,
      "initial_soc": 100,
      "seed": 1,
      "load_profile": {"kind": "household_day", "mean_w": 1300},
        or {"kind": "flat", "watts": 700},
        or {"kind": "custom", "steps": [[0, 0], [3600, 700]]},
      "grid_outages": [[1000, 1010], ...],
      "plant": {"charger_power": 600, ...}
    }

start_hour anchors scenario time to the wall clock: t=0 is that hour of
day, which drives both the charge-window slot index and tariff lookups.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence, Tuple

from dcmctl.plant.config import PlantConfig
from dcmctl.plant.profiles import Segment, make_load_profile


@dataclass(frozen=True)
class Scenario:
    duration: float
    load_profile: Sequence[Segment]
    grid_outages: Sequence[Tuple[float, float]] = field(default_factory=tuple)
    initial_soc: float = 100.0
    plant: PlantConfig = field(default_factory=PlantConfig)
    seed: int = 0
    start_hour: int = 0

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("scenario.duration must be > 0")
        if not 0 <= self.initial_soc <= 100:
            raise ValueError("scenario.initial_soc outside [0, 100]")
        if not 0 <= self.start_hour <= 23:
            raise ValueError("scenario.start_hour outside [0, 23]")
        if not self.load_profile:
            raise ValueError("scenario.load_profile is empty")
        if any(w < 0 for _, w in self.load_profile):
            raise ValueError("scenario load profile has negative watts")
        prev_end = 0.0
        for start, end in sorted(self.grid_outages):
            if start < 0 or end > self.duration:
                raise ValueError(f"outage [{start}, {end}] outside [0, {self.duration}]")
            if end <= start:
                raise ValueError(f"outage [{start}, {end}] is empty or reversed")
            if start < prev_end:
                raise ValueError(f"outage starting at {start} overlaps the previous one")
            prev_end = end
        object.__setattr__(
            self, "grid_outages", tuple(sorted(tuple(o) for o in self.grid_outages))
        )
        object.__setattr__(self, "load_profile", tuple(self.load_profile))

    def grid_up(self, t: float) -> bool:
        return not any(start <= t < end for start, end in self.grid_outages)

    def hour_of_day(self, t: float) -> int:
        return int((self.start_hour + t / 3600.0) % 24)

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        profile_spec = dict(d.get("load_profile") or {"kind": "flat", "watts": 0.0})
        kind = profile_spec.pop("kind", None)
        if kind is None:
            raise ValueError("scenario.load_profile.kind missing")
        if kind == "household_day":
            profile_spec.setdefault("duration", d["duration"])
            # align the daily shape with the scenario clock by default
            profile_spec.setdefault("start_hour", int(d.get("start_hour", 0)))
        profile = make_load_profile(kind, **profile_spec)
        plant = PlantConfig(**(d.get("plant") or {}))
        return cls(
            duration=float(d["duration"]),
            load_profile=profile,
            grid_outages=[tuple(o) for o in d.get("grid_outages", [])],
            initial_soc=float(d.get("initial_soc", 100.0)),
            plant=plant,
            seed=int(d.get("seed", 0)),
            start_hour=int(d.get("start_hour", 0)),
        )


def load_scenario(path) -> Scenario:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"scenario {path}: invalid JSON: {e}") from e
    try:
        return Scenario.from_dict(data)
    except (KeyError, TypeError) as e:
        raise ValueError(f"scenario {path}: {e}") from e
