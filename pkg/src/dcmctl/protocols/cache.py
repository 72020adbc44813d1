"""Rate-limited sensor polling.

The AC meters settle their energy accumulators about once a second;
polling faster buys nothing and loads the serial bus. PollCache wraps a
fetch callable and enforces a minimum period between real reads: a
request arriving earlier is answered with the cached reading.

The clock is injectable so tests can drive time explicitly.
"""

from __future__ import annotations

import time
from typing import Callable, Generic, Optional, Tuple, TypeVar

T = TypeVar("T")


class PollCache(Generic[T]):
    def __init__(
        self,
        fetch: Callable[[], T],
        min_period: float = 1.0,
        clock: Callable[[], float] = time.monotonic,
    ):
        if min_period <= 0:
            raise ValueError("min_period must be positive")
        self._fetch = fetch
        self._min_period = min_period
        self._clock = clock
        self._last: Optional[Tuple[float, T]] = None

    @property
    def min_period(self) -> float:
        return self._min_period

    def read(self) -> T:
        """Return a fresh reading, or the cached one inside the period."""
        now = self._clock()
        if self._last is not None and now - self._last[0] < self._min_period:
            return self._last[1]
        value = self._fetch()
        # replace atomically so a failed fetch keeps the old entry intact
        self._last = (now, value)
        return value

    def age(self) -> Optional[float]:
        """Seconds since the cached reading was fetched, or None if empty."""
        if self._last is None:
            return None
        return self._clock() - self._last[0]

    def invalidate(self) -> None:
        self._last = None
