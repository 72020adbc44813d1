"""BMS telemetry frames on the battery CAN bus.

Three 11-bit identifiers are decoded, following the common Pylontech
low-voltage layout. All multi-byte fields are little-endian.

    0x355  state frame        u16 SoC %, u16 SoH %
    0x356  measurement frame  s16 pack voltage 0.01 V, s16 pack current
                              0.1 A (positive = discharge), s16
                              temperature 0.1 degC
    0x359  protection frame   byte 0 is an alarm bitset (bytes 1..3
                              reserved, sent as zero)

Alarm bits in 0x359 byte 0:
    0x01 over_voltage   0x02 under_voltage   0x04 over_current
    0x08 short_circuit  0x10 thermal

Frames with other identifiers are skipped (real buses carry more traffic
than a decoder knows about); a frame whose payload length does not match
the registered layout is a framing error.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass
from typing import Optional

from dcmctl.protocols.errors import FramingError, ValidationError

log = logging.getLogger(__name__)

BMS_STATE_ID = 0x355
BMS_MEASUREMENT_ID = 0x356
BMS_PROTECTION_ID = 0x359

# id -> expected payload length
BMS_FRAME_LAYOUTS = {
    BMS_STATE_ID: 4,
    BMS_MEASUREMENT_ID: 6,
    BMS_PROTECTION_ID: 4,
}

ALARM_BITS = {
    0x01: "over_voltage",
    0x02: "under_voltage",
    0x04: "over_current",
    0x08: "short_circuit",
    0x10: "thermal",
}

PACK_VOLTAGE_LSB = 0.01
PACK_CURRENT_LSB = 0.1
TEMPERATURE_LSB = 0.1


@dataclass(frozen=True)
class BmsFrame:
    """Raw CAN frame: 11-bit identifier plus up to 8 data bytes."""

    can_id: int
    payload: bytes

    def __post_init__(self):
        if not 0 <= self.can_id <= 0x7FF:
            raise ValidationError(f"can id 0x{self.can_id:X} outside 11-bit range")
        if len(self.payload) > 8:
            raise FramingError(f"payload {len(self.payload)} bytes exceeds CAN maximum of 8")


@dataclass
class BmsUpdate:
    """Partial battery update; only the fields carried by one frame are set."""

    soc: Optional[float] = None
    soh: Optional[float] = None
    pack_voltage: Optional[float] = None
    pack_current: Optional[float] = None
    temperature: Optional[float] = None
    alarms: Optional[frozenset[str]] = None

    def merge(self, other: "BmsUpdate") -> "BmsUpdate":
        """Newer non-None fields from `other` replace this update's."""
        return BmsUpdate(
            soc=other.soc if other.soc is not None else self.soc,
            soh=other.soh if other.soh is not None else self.soh,
            pack_voltage=other.pack_voltage if other.pack_voltage is not None else self.pack_voltage,
            pack_current=other.pack_current if other.pack_current is not None else self.pack_current,
            temperature=other.temperature if other.temperature is not None else self.temperature,
            alarms=other.alarms if other.alarms is not None else self.alarms,
        )


def decode_bms_frame(frame: BmsFrame) -> Optional[BmsUpdate]:
    """Decode one frame, or return None for an unregistered identifier."""
    expected = BMS_FRAME_LAYOUTS.get(frame.can_id)
    if expected is None:
        log.debug("skipping unknown CAN id 0x%03X", frame.can_id)
        return None
    if len(frame.payload) != expected:
        raise FramingError(
            f"id 0x{frame.can_id:03X} expects {expected} bytes, got {len(frame.payload)}"
        )
    if frame.can_id == BMS_STATE_ID:
        soc, soh = struct.unpack("<HH", frame.payload)
        if soc > 100 or soh > 100:
            raise ValidationError(f"soc/soh out of range: {soc}/{soh}")
        return BmsUpdate(soc=float(soc), soh=float(soh))
    if frame.can_id == BMS_MEASUREMENT_ID:
        volt, curr, temp = struct.unpack("<hhh", frame.payload)
        return BmsUpdate(
            pack_voltage=volt * PACK_VOLTAGE_LSB,
            pack_current=curr * PACK_CURRENT_LSB,
            temperature=temp * TEMPERATURE_LSB,
        )
    bits = frame.payload[0]
    alarms = frozenset(name for bit, name in ALARM_BITS.items() if bits & bit)
    return BmsUpdate(alarms=alarms)


def encode_bms_soc_frame(soc: float, soh: float) -> BmsFrame:
    """State frame; SoC/SoH are truncated to whole percent like real packs."""
    soc_i, soh_i = int(soc), int(soh)
    if not (0 <= soc_i <= 100 and 0 <= soh_i <= 100):
        raise ValidationError(f"soc/soh out of range: {soc}/{soh}")
    return BmsFrame(BMS_STATE_ID, struct.pack("<HH", soc_i, soh_i))


def encode_bms_measurement_frame(pack_voltage: float, pack_current: float, temperature: float) -> BmsFrame:
    payload = struct.pack(
        "<hhh",
        round(pack_voltage / PACK_VOLTAGE_LSB),
        round(pack_current / PACK_CURRENT_LSB),
        round(temperature / TEMPERATURE_LSB),
    )
    return BmsFrame(BMS_MEASUREMENT_ID, payload)


def encode_bms_alarm_frame(alarms) -> BmsFrame:
    bits = 0
    for bit, name in ALARM_BITS.items():
        if name in alarms:
            bits |= bit
    return BmsFrame(BMS_PROTECTION_ID, bytes((bits, 0, 0, 0)))
