"""Sensing-layer frame codecs: Modbus-RTU (PZEM-016) and CAN (BMS)."""

from dcmctl.protocols.errors import (
    CodecError,
    CrcError,
    FramingError,
    ProtocolError,
    ValidationError,
)
from dcmctl.protocols.crc import crc16_modbus, append_crc, check_crc
from dcmctl.protocols.modbus import (
    ModbusFrame,
    PZEM_FUNCTION_READ_INPUT,
    encode_pzem_read_request,
    encode_pzem_response,
    decode_pzem_response,
)
from dcmctl.protocols.canbus import (
    BmsFrame,
    BmsUpdate,
    BMS_FRAME_LAYOUTS,
    decode_bms_frame,
    encode_bms_soc_frame,
    encode_bms_measurement_frame,
    encode_bms_alarm_frame,
)
from dcmctl.protocols.cache import PollCache

__all__ = [
    "CodecError",
    "CrcError",
    "FramingError",
    "ProtocolError",
    "ValidationError",
    "crc16_modbus",
    "append_crc",
    "check_crc",
    "ModbusFrame",
    "PZEM_FUNCTION_READ_INPUT",
    "encode_pzem_read_request",
    "encode_pzem_response",
    "decode_pzem_response",
    "BmsFrame",
    "BmsUpdate",
    "BMS_FRAME_LAYOUTS",
    "decode_bms_frame",
    "encode_bms_soc_frame",
    "encode_bms_measurement_frame",
    "encode_bms_alarm_frame",
    "PollCache",
]
