"""Independent reference implementations used to cross-check the package.

Everything here is written from first principles (bitwise CRC shift
register, direct transcription of the relay decision rules) rather than
imported from the package under test, so a bug cannot hide in both.
"""

from __future__ import annotations


def crc16_bitwise(data: bytes) -> int:
    """CRC-16/MODBUS, one bit at a time: poly 0xA001 (reflected 0x8005),
    init 0xFFFF, no final xor."""
    crc = 0xFFFF
    for byte in data:
        crc ^= byte
        for _ in range(8):
            if crc & 1:
                crc = (crc >> 1) ^ 0xA001
            else:
                crc >>= 1
    return crc


def decide_relay_mode_oracle(
    soc: int,
    minute: int,
    relay_mode: int,
    em_mode: int,
    load_w: float,
    threshold_w: float = 700.0,
    boundary: int = 6,
) -> str:
    """Direct transcription of the relay decision rules as a flat elif
    chain. Returns one of 'emergency_off', 'battery', 'grid_charge',
    'hold'."""
    if em_mode == 1:
        return "emergency_off"
    elif relay_mode == 1:
        return "battery"
    elif relay_mode == 2:
        return "grid_charge"
    elif load_w >= threshold_w:
        return "battery"
    elif soc > 20 and minute > boundary:
        return "battery"
    elif soc != 100 and minute < boundary:
        return "grid_charge"
    elif soc == 100 and minute < boundary:
        return "battery"
    elif soc < 20:
        return "grid_charge"
    else:
        return "hold"
