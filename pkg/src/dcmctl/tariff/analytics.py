"""Billing and load-shape analytics over fixed-step power series."""

from __future__ import annotations

import math
from typing import Dict, Sequence

import numpy as np

from dcmctl.tariff.schedule import TariffSchedule


def demand_charge(series_w: Sequence[float], dt_s: float, tariff: TariffSchedule) -> float:
    """Demand component of the bill: demand_rate times the highest
    average power (kW) over any aligned demand interval."""
    series = np.asarray(series_w, dtype=float)
    if series.size == 0:
        raise ValueError("empty series")
    if dt_s <= 0:
        raise ValueError("dt_s must be > 0")
    window = int(round(tariff.demand_interval_min * 60.0 / dt_s))
    if window < 1 or series.size < window:
        raise ValueError(
            f"series covers less than one {tariff.demand_interval_min:.0f}-minute demand interval"
        )
    full = series.size // window
    windows = series[: full * window].reshape(full, window)
    peak_kw = windows.mean(axis=1).max() / 1000.0
    return tariff.demand_rate * peak_kw


def backup_runtime(capacity_wh: float, load_w: float) -> float:
    """Hours a store of capacity_wh sustains a constant load_w."""
    if load_w <= 0:
        raise ValueError(f"load {load_w} W must be > 0")
    if capacity_wh < 0:
        raise ValueError(f"capacity {capacity_wh} Wh must be >= 0")
    return capacity_wh / load_w


def energy_cost(
    series_w: Sequence[float],
    dt_s: float,
    tariff: TariffSchedule,
    start_hour: float = 0.0,
) -> float:
    """Energy component of the bill over the series, rated per window."""
    series = np.asarray(series_w, dtype=float)
    if dt_s <= 0:
        raise ValueError("dt_s must be > 0")
    cost = 0.0
    for k, watts in enumerate(series):
        hour = (start_hour + k * dt_s / 3600.0) % 24.0
        cost += max(watts, 0.0) * dt_s / 3600.0 / 1000.0 * tariff.rate_at(hour)
    return cost


def flattening_metrics(base_w: Sequence[float], net_w: Sequence[float]) -> Dict[str, float]:
    """How much flatter the net grid draw is than the raw load."""
    base = np.asarray(base_w, dtype=float)
    net = np.asarray(net_w, dtype=float)
    if base.shape != net.shape:
        raise ValueError(f"series length mismatch: {base.shape} vs {net.shape}")
    if base.size == 0:
        raise ValueError("empty series")
    var_base = float(np.var(base))
    var_net = float(np.var(net))
    if var_base == 0.0:
        ratio = 1.0 if var_net == 0.0 else math.inf
    else:
        ratio = var_net / var_base
    def load_factor(series: np.ndarray) -> float:
        peak = float(series.max())
        return float(series.mean()) / peak if peak > 0 else 0.0
    return {
        "peak_reduction_w": float(base.max() - net.max()),
        "variance_ratio": ratio,
        "load_factor_before": load_factor(base),
        "load_factor_after": load_factor(net),
    }
