"""Structured decode errors.

Decoders never raise anything outside this hierarchy for malformed input:
arbitrary bytes must produce a CodecError subclass, not an IndexError or
a struct.error leaking out.
"""


class CodecError(Exception):
    """Base class for all frame encode/decode failures."""


class CrcError(CodecError):
    """Checksum mismatch; the frame is corrupt and must be discarded."""


class FramingError(CodecError):
    """Frame too short, wrong byte count, or wrong payload length."""


class ProtocolError(CodecError):
    """Well-formed frame carrying an unexpected function or exception code."""


class ValidationError(CodecError):
    """Field value outside its legal range (bad address, bad scale)."""
