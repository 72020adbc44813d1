"""Shared control-layer types.

The transfer hardware is four relays. Relays 4 and 5 pick the supply
feeding the main loads and the UPS-protected loads: their normally
closed contact is the grid, the normally open contact is the inverter
output. Relay 6 selects the battery path between the charger (NC) and
the inverter input (NO). A heavier external DC relay makes or breaks
the battery-to-inverter DC link.

De-energizing everything therefore lands on grid supply with the
charger in circuit and the DC link open, which doubles as the
emergency posture: loss of coil drive can only ever fail toward the
grid.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class RelayMode(enum.IntEnum):
    """Operator mode selector as carried in commands and telemetry."""

    AUTO = 0
    FORCE_BATTERY = 1
    FORCE_GRID = 2


class LoadSource(str, enum.Enum):
    GRID_NC = "grid_nc"
    INVERTER_NO = "inverter_no"


class BatteryPath(str, enum.Enum):
    CHARGE = "charge"
    DISCHARGE = "discharge"


class ExternalRelay(str, enum.Enum):
    OPEN = "open"
    CLOSED = "closed"


class Target(str, enum.Enum):
    """What a decision asks the relay bank to become."""

    BATTERY = "battery"
    GRID = "grid"
    HOLD = "hold"
    EMERGENCY_OFF = "emergency_off"


class DecisionReason(str, enum.Enum):
    EMERGENCY_STOP = "emergency_stop"
    MANUAL_BATTERY = "manual_battery"
    MANUAL_GRID = "manual_grid"
    LOAD_ABOVE_THRESHOLD = "load_above_threshold"
    WINDOW_DISCHARGE = "window_discharge"
    WINDOW_CHARGE = "window_charge"
    FULL_AT_CHARGE_WINDOW = "full_at_charge_window"
    LOW_SOC_CHARGE = "low_soc_charge"
    NO_BRANCH = "no_branch"
    # reasons below come from the supervisory layer, not the base rules
    STALE_TELEMETRY = "stale_telemetry"
    GRID_OUTAGE = "grid_outage"
    DWELL_HOLD = "dwell_hold"
    SOC_FLOOR = "soc_floor"


@dataclass(frozen=True)
class ControlInputs:
    """Inputs to one decision: battery state, load, operator selections,
    and the time-slot index compared against the charging-window
    boundary."""

    soc: float
    load_power: float
    present_minute: int
    relay_mode: RelayMode = RelayMode.AUTO
    em_mode: bool = False
    power_threshold: float = 700.0
    window_boundary: int = 6

    def __post_init__(self):
        if not 0 <= self.soc <= 100:
            raise ValueError(f"soc {self.soc} outside [0, 100]")
        if self.power_threshold <= 0:
            raise ValueError(f"power_threshold {self.power_threshold} must be > 0")
        if self.relay_mode not in (0, 1, 2):
            raise ValueError(f"relay_mode {self.relay_mode} not in {{0, 1, 2}}")


@dataclass(frozen=True)
class Decision:
    target: Target
    reason: DecisionReason
    # grid decisions taken to top up the battery set this; the plant
    # runs the charger whenever it is on grid and not full regardless
    charging: bool = False


@dataclass(frozen=True)
class RelayBank:
    relay4_load_source: LoadSource = LoadSource.GRID_NC
    relay5_ups_source: LoadSource = LoadSource.GRID_NC
    relay6_battery_path: BatteryPath = BatteryPath.CHARGE
    external_dc_relay: ExternalRelay = ExternalRelay.OPEN

    @classmethod
    def de_energized(cls) -> "RelayBank":
        return cls()

    @classmethod
    def grid(cls) -> "RelayBank":
        # grid supply is the de-energized posture by construction
        return cls()

    @classmethod
    def battery(cls) -> "RelayBank":
        return cls(
            relay4_load_source=LoadSource.INVERTER_NO,
            relay5_ups_source=LoadSource.INVERTER_NO,
            relay6_battery_path=BatteryPath.DISCHARGE,
            external_dc_relay=ExternalRelay.CLOSED,
        )

    @property
    def is_battery_mode(self) -> bool:
        return (
            self.relay4_load_source is LoadSource.INVERTER_NO
            and self.relay6_battery_path is BatteryPath.DISCHARGE
            and self.external_dc_relay is ExternalRelay.CLOSED
        )

    @property
    def is_de_energized(self) -> bool:
        return self == RelayBank.de_energized()

    @property
    def mode(self) -> str:
        """Coarse label for telemetry: which source feeds the loads."""
        return "battery" if self.is_battery_mode else "grid"

    def as_dict(self) -> dict:
        return {
            "relay4_load_source": self.relay4_load_source.value,
            "relay5_ups_source": self.relay5_ups_source.value,
            "relay6_battery_path": self.relay6_battery_path.value,
            "external_dc_relay": self.external_dc_relay.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RelayBank":
        return cls(
            relay4_load_source=LoadSource(d["relay4_load_source"]),
            relay5_ups_source=LoadSource(d["relay5_ups_source"]),
            relay6_battery_path=BatteryPath(d["relay6_battery_path"]),
            external_dc_relay=ExternalRelay(d["external_dc_relay"]),
        )
