"""Runtime configuration.

Config files are plain text, one dotted key per line:

    # comment
    control.power_threshold = 650
    plant.tick = 0.5
    tariff.windows = 0-6:0.12:off_peak;6-21:0.30:peak;21-24:0.25:shoulder
    broker.websocket_port = 8765
    scenario.path = scenarios/reference_day.json

Environment variables override file values: DCM_<SECTION>_<KEY>, e.g.
DCM_CONTROL_POWER_THRESHOLD=650. Unknown keys and out-of-range values
fail loudly with the offending key named.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from typing import Dict, Optional

from dcmctl.control.loop import ControlSettings
from dcmctl.plant.config import PlantConfig
from dcmctl.tariff.arbitrage import reference_tariff
from dcmctl.tariff.schedule import TariffSchedule, TariffWindow


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BrokerConfig:
    host: str = "127.0.0.1"
    port: int = 1883              # reserved for an external broker bridge
    websocket_port: int = 8765

    def __post_init__(self):
        for name in ("port", "websocket_port"):
            v = getattr(self, name)
            if not 0 < v < 65536:
                raise ValueError(f"{name} must be a valid TCP port, got {v}")


@dataclass(frozen=True)
class AppConfig:
    plant: PlantConfig = field(default_factory=PlantConfig)
    control: ControlSettings = field(default_factory=ControlSettings)
    tariff: TariffSchedule = field(default_factory=reference_tariff)
    broker: BrokerConfig = field(default_factory=BrokerConfig)
    scenario_path: Optional[str] = None


# accepted spellings for keys whose settings field carries a unit suffix
_CONTROL_ALIASES = {
    "hysteresis": "hysteresis_w",
    "min_dwell": "min_dwell_s",
    "poll_period": "poll_period_s",
    "soc_floor_enabled": "soc_floor_enable",
}

_SECTION_FIELDS = {
    "plant": {f.name: f.type for f in fields(PlantConfig)},
    "control": {f.name: f.type for f in fields(ControlSettings)},
    "broker": {f.name: f.type for f in fields(BrokerConfig)},
}


def _coerce(key: str, raw: str):
    text = raw.strip()
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def parse_tariff_windows(spec: str) -> tuple:
    """`0-6:0.12:off_peak;6-21:0.30:peak` -> TariffWindow tuple."""
    windows = []
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        bits = part.split(":")
        if len(bits) != 3:
            raise ConfigError(
                f"tariff.windows entry {part!r} must be start-end:rate:label"
            )
        span, rate, label = bits
        if "-" not in span:
            raise ConfigError(f"tariff.windows span {span!r} must be start-end")
        lo, hi = span.split("-", 1)
        try:
            windows.append(
                TariffWindow(float(lo), float(hi), float(rate), label.strip())
            )
        except ValueError as e:
            raise ConfigError(f"tariff.windows entry {part!r}: {e}") from e
    if not windows:
        raise ConfigError("tariff.windows is empty")
    return tuple(windows)


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, object]:
    """Flat {dotted_key: value} map from the text format."""
    values: Dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip().lower()
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        values[key] = raw.strip() if key == "tariff.windows" else _coerce(key, raw)
    return values


def _env_overrides(env) -> Dict[str, object]:
    values: Dict[str, object] = {}
    for name, raw in env.items():
        if not name.startswith("DCM_"):
            continue
        rest = name[4:].lower()
        section, _, key = rest.partition("_")
        if not key:
            continue
        dotted = f"{section}.{key}"
        values[dotted] = raw if dotted == "tariff.windows" else _coerce(dotted, raw)
    return values


def _build(values: Dict[str, object]) -> AppConfig:
    sections: Dict[str, Dict[str, object]] = {"plant": {}, "control": {}, "broker": {}}
    tariff_kw: Dict[str, object] = {}
    scenario_path: Optional[str] = None

    for dotted, value in values.items():
        section, _, key = dotted.partition(".")
        if section == "scenario" and key == "path":
            scenario_path = str(value)
            continue
        if section == "tariff":
            if key == "windows":
                tariff_kw["windows"] = parse_tariff_windows(str(value))
            elif key == "demand_rate":
                tariff_kw["demand_rate"] = float(value)
            elif key == "demand_interval_min":
                tariff_kw["demand_interval_min"] = float(value)
            else:
                raise ConfigError(f"unknown config key {dotted!r}")
            continue
        if section not in sections:
            raise ConfigError(f"unknown config key {dotted!r}")
        if section == "control":
            key = _CONTROL_ALIASES.get(key, key)
        if key not in _SECTION_FIELDS[section]:
            raise ConfigError(f"unknown config key {dotted!r}")
        sections[section][key] = value

    def construct(cls, section):
        try:
            return cls(**sections[section])
        except (TypeError, ValueError) as e:
            raise ConfigError(f"[{section}] {e}") from e

    plant = construct(PlantConfig, "plant")
    control = construct(ControlSettings, "control")
    broker = construct(BrokerConfig, "broker")

    base = reference_tariff()
    try:
        tariff = TariffSchedule(
            windows=tariff_kw.get("windows", base.windows),
            demand_rate=tariff_kw.get("demand_rate", base.demand_rate),
            demand_interval_min=tariff_kw.get("demand_interval_min", base.demand_interval_min),
        )
    except ValueError as e:
        raise ConfigError(f"[tariff] {e}") from e

    return AppConfig(
        plant=plant,
        control=control,
        tariff=tariff,
        broker=broker,
        scenario_path=scenario_path,
    )


def load_config(path: Optional[str] = None, env=None) -> AppConfig:
    """Defaults, overlaid with the file at `path` (when given), overlaid
    with DCM_* environment variables."""
    values: Dict[str, object] = {}
    if path is not None:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as e:
            raise ConfigError(f"cannot read config {path!r}: {e}") from e
        values.update(parse_config_text(text, source=str(path)))
    values.update(_env_overrides(os.environ if env is None else env))
    return _build(values)
