"""CRC-16/MODBUS over RTU frames.

Polynomial 0xA001 (0x8005 reflected), initial value 0xFFFF, no final xor.
The checksum is appended to the frame low byte first.
"""

from dcmctl.protocols.errors import CrcError, FramingError

# 256-entry lookup table for the reflected polynomial 0xA001.
_TABLE = []
for _byte in range(256):
    _crc = _byte
    for _ in range(8):
        if _crc & 1:
            _crc = (_crc >> 1) ^ 0xA001
        else:
            _crc >>= 1
    _TABLE.append(_crc)


def crc16_modbus(data: bytes) -> int:
    """Checksum of `data`; at least one byte is required."""
    if len(data) < 1:
        raise FramingError("crc16 input must be at least 1 byte")
    crc = 0xFFFF
    for b in data:
        crc = (crc >> 8) ^ _TABLE[(crc ^ b) & 0xFF]
    return crc


def append_crc(data: bytes) -> bytes:
    """Return `data` with its CRC appended low byte first."""
    crc = crc16_modbus(data)
    return data + bytes((crc & 0xFF, crc >> 8))


def check_crc(frame: bytes) -> bytes:
    """Verify the trailing CRC and return the frame body without it.

    Raises FramingError for frames shorter than the 4-byte RTU minimum
    and CrcError on checksum mismatch.
    """
    if len(frame) < 4:
        raise FramingError(f"frame too short for RTU: {len(frame)} bytes")
    body, crc_bytes = frame[:-2], frame[-2:]
    expected = crc16_modbus(body)
    received = crc_bytes[0] | (crc_bytes[1] << 8)
    if expected != received:
        raise CrcError(
            f"crc mismatch: computed 0x{expected:04X}, frame carries 0x{received:04X}"
        )
    return body
