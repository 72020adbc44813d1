"""Load profiles as piecewise-constant step series.

A profile is a list of (start_seconds, watts) segments sorted by start;
each segment holds until the next one begins. The household shape is 24
hourly multipliers around a configurable mean; the multipliers sum to
exactly 24 so the daily mean is the configured mean exactly.
"""

from __future__ import annotations

import bisect
from typing import List, Sequence, Tuple

Segment = Tuple[float, float]

# fraction of the daily mean drawn during each hour of the wall-clock
# day: overnight trough, morning rise, midday plateau, evening peak
HOUSEHOLD_HOURLY = [
    0.40, 0.35, 0.35, 0.35, 0.40, 0.50,
    0.90, 1.20, 1.00, 0.95, 0.80, 0.85,
    1.00, 0.85, 0.85, 1.05, 1.50, 1.80,
    2.10, 2.00, 1.70, 1.40, 1.00, 0.70,
]

assert abs(sum(HOUSEHOLD_HOURLY) - 24.0) < 1e-12


def make_load_profile(kind: str, **params) -> List[Segment]:
    """Build a profile. Kinds:

    flat(watts, duration)
    household_day(mean_w=1300, duration=86400, start_hour=0)
    custom(steps=[(t, w), ...])
    """
    if kind == "flat":
        watts = float(params["watts"])
        if watts < 0:
            raise ValueError("flat profile watts must be >= 0")
        return [(0.0, watts)]
    if kind == "household_day":
        mean_w = float(params.get("mean_w", 1300.0))
        duration = float(params.get("duration", 86400.0))
        start_hour = int(params.get("start_hour", 0))
        if mean_w < 0 or duration <= 0:
            raise ValueError("household_day needs mean_w >= 0 and duration > 0")
        segments = []
        hour = 0
        while hour * 3600.0 < duration:
            wall = (start_hour + hour) % 24
            segments.append((hour * 3600.0, mean_w * HOUSEHOLD_HOURLY[wall]))
            hour += 1
        return segments
    if kind == "custom":
        steps = [(float(t), float(w)) for t, w in params["steps"]]
        if not steps:
            raise ValueError("custom profile needs at least one step")
        if steps[0][0] != 0.0:
            raise ValueError("custom profile must start at t=0")
        if any(w < 0 for _, w in steps):
            raise ValueError("custom profile watts must be >= 0")
        if any(b[0] <= a[0] for a, b in zip(steps, steps[1:])):
            raise ValueError("custom profile steps must be strictly increasing in time")
        return steps
    raise ValueError(f"unknown profile kind {kind!r}")


def value_at(profile: Sequence[Segment], t: float) -> float:
    """Watts drawn at time t (last segment whose start is <= t)."""
    if not profile or t < profile[0][0]:
        raise ValueError(f"t={t} precedes the profile start")
    starts = [s for s, _ in profile]
    return profile[bisect.bisect_right(starts, t) - 1][1]


def mean_power(profile: Sequence[Segment], duration: float) -> float:
    """Time-weighted mean watts over [0, duration)."""
    total = 0.0
    for i, (start, watts) in enumerate(profile):
        end = profile[i + 1][0] if i + 1 < len(profile) else duration
        end = min(end, duration)
        if end > start:
            total += watts * (end - start)
    return total / duration
