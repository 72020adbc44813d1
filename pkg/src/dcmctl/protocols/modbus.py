"""PZEM-016 energy meter frames over Modbus-RTU.

The meter exposes one block of ten 16-bit input registers read with
function 0x04. Registers are big-endian on the wire; 32-bit quantities
are split low word first, following the vendor register map:

    reg 0      voltage        0.1 V
    reg 1,2    current        0.001 A   (low word, high word)
    reg 3,4    power          0.1 W     (low word, high word)
    reg 5,6    energy         1 Wh      (low word, high word)
    reg 7      frequency      0.1 Hz
    reg 8      power factor   0.01
    reg 9      alarm status   0xFFFF = power alarm active
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from dcmctl.protocols.crc import append_crc, check_crc
from dcmctl.protocols.errors import FramingError, ProtocolError, ValidationError

PZEM_FUNCTION_READ_INPUT = 0x04
PZEM_REGISTER_COUNT = 10
PZEM_RESPONSE_BYTES = 2 * PZEM_REGISTER_COUNT

VOLTAGE_LSB = 0.1
CURRENT_LSB = 0.001
POWER_LSB = 0.1
ENERGY_LSB = 1.0
FREQUENCY_LSB = 0.1
PF_LSB = 0.01


@dataclass(frozen=True)
class ModbusFrame:
    """A checked RTU frame split into address, function, and payload."""

    address: int
    function: int
    payload: bytes

    @property
    def raw(self) -> bytes:
        return append_crc(bytes((self.address, self.function)) + self.payload)

    @classmethod
    def parse(cls, raw: bytes) -> "ModbusFrame":
        body = check_crc(bytes(raw))
        if len(body) < 2:
            raise FramingError("frame body shorter than address + function")
        return cls(address=body[0], function=body[1], payload=body[2:])


@dataclass(frozen=True)
class MeterSample:
    """One decoded meter reading in physical units."""

    voltage: float
    current: float
    power: float
    energy: float
    frequency: float
    power_factor: float
    alarm: bool = False


def _require_address(address: int) -> None:
    if not 1 <= address <= 247:
        raise ValidationError(f"slave address {address} outside [1, 247]")


def encode_pzem_read_request(address: int) -> bytes:
    """Request the full 10-register measurement block from one meter."""
    _require_address(address)
    body = struct.pack(">BBHH", address, PZEM_FUNCTION_READ_INPUT, 0x0000, PZEM_REGISTER_COUNT)
    return append_crc(body)


def _split_u32(value: int) -> tuple[int, int]:
    # Vendor order: low word first.
    return value & 0xFFFF, (value >> 16) & 0xFFFF


def encode_pzem_response(address: int, sample: MeterSample) -> bytes:
    """Encode a reading as the meter would answer a block read.

    Physical values are converted onto the register grid with round-half
    -away handled by round(); values outside the representable range
    raise ValidationError.
    """
    _require_address(address)
    regs = _sample_to_registers(sample)
    payload = struct.pack(">10H", *regs)
    body = bytes((address, PZEM_FUNCTION_READ_INPUT, PZEM_RESPONSE_BYTES)) + payload
    return append_crc(body)


def _sample_to_registers(sample: MeterSample) -> list[int]:
    voltage = round(sample.voltage / VOLTAGE_LSB)
    current = round(sample.current / CURRENT_LSB)
    power = round(sample.power / POWER_LSB)
    energy = round(sample.energy / ENERGY_LSB)
    frequency = round(sample.frequency / FREQUENCY_LSB)
    pf = round(sample.power_factor / PF_LSB)
    for name, value, limit in (
        ("voltage", voltage, 0xFFFF),
        ("current", current, 0xFFFFFFFF),
        ("power", power, 0xFFFFFFFF),
        ("energy", energy, 0xFFFFFFFF),
        ("frequency", frequency, 0xFFFF),
        ("power_factor", pf, 100),
    ):
        if not 0 <= value <= limit:
            raise ValidationError(f"{name} register value {value} outside [0, {limit}]")
    cur_lo, cur_hi = _split_u32(current)
    pow_lo, pow_hi = _split_u32(power)
    en_lo, en_hi = _split_u32(energy)
    alarm = 0xFFFF if sample.alarm else 0x0000
    return [voltage, cur_lo, cur_hi, pow_lo, pow_hi, en_lo, en_hi, frequency, pf, alarm]


def decode_pzem_response(raw: bytes) -> MeterSample:
    """Decode a block-read response into physical units.

    Raises CrcError on a bad checksum, ProtocolError on a wrong function
    code (including Modbus exception responses), and FramingError when
    the byte count is not the full register block.
    """
    frame = ModbusFrame.parse(raw)
    if frame.function != PZEM_FUNCTION_READ_INPUT:
        raise ProtocolError(f"unexpected function 0x{frame.function:02X}")
    if len(frame.payload) < 1 or frame.payload[0] != PZEM_RESPONSE_BYTES:
        raise FramingError("response does not carry the 20-byte register block")
    data = frame.payload[1:]
    if len(data) != PZEM_RESPONSE_BYTES:
        raise FramingError(f"register block truncated: {len(data)} bytes")
    regs = struct.unpack(">10H", data)
    current = regs[1] | (regs[2] << 16)
    power = regs[3] | (regs[4] << 16)
    energy = regs[5] | (regs[6] << 16)
    pf = regs[8] * PF_LSB
    if pf > 1.0:
        raise ValidationError(f"power factor register {regs[8]} above 100")
    return MeterSample(
        voltage=regs[0] * VOLTAGE_LSB,
        current=current * CURRENT_LSB,
        power=power * POWER_LSB,
        energy=energy * ENERGY_LSB,
        frequency=regs[7] * FREQUENCY_LSB,
        power_factor=pf,
        alarm=regs[9] == 0xFFFF,
    )
