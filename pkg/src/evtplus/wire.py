"""Single 32-bit datum words.

Every word is ``[code:8][payload:24]``. Where a datum carries an address it
sits in payload bits 23..8 and the trailing 8-bit field in bits 7..0. Words
travel big-endian so the code byte is the first byte on the wire.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Union

from .errors import FieldOverflow, NonzeroPadding, UnknownDatumCode

WORD_BYTES = 4


class Polarity(IntEnum):
    OFF = 0
    ON = 1


class DatumCode(IntEnum):
    TS_MSB = 0x01
    EVENT_Y = 0x02
    MIXED_X_ON_MSB = 0x03
    MIXED_X_OFF_MSB = 0x04
    MIXED_X_LSB = 0x05
    EVENT_X_ON = 0x06
    EVENT_X_OFF = 0x07
    VEC_X_ON_MSB = 0x08
    VEC_X_OFF_MSB = 0x09
    VEC_X_LSB = 0x0A
    VEC_X_INTENSITY_MSB = 0x0B
    VEC_X_INTENSITY_LSB = 0x0C


@dataclass(frozen=True, slots=True)
class TsMsb:
    ts_msb: int


@dataclass(frozen=True, slots=True)
class EventY:
    y: int
    ts_lsb: int


@dataclass(frozen=True, slots=True)
class MixedXMsb:
    polarity: Polarity
    x: int
    intensity_msb: int


@dataclass(frozen=True, slots=True)
class MixedXLsb:
    intensity_lsb24: int


@dataclass(frozen=True, slots=True)
class EventX:
    polarity: Polarity
    x: int
    ts_llsb: int


@dataclass(frozen=True, slots=True)
class VecXMsb:
    polarity: Polarity
    root_x: int
    onehot8: int


@dataclass(frozen=True, slots=True)
class VecXLsb:
    onehot24: int


@dataclass(frozen=True, slots=True)
class VecIntensityMsb:
    intensity_msb24: int


@dataclass(frozen=True, slots=True)
class VecIntensityLsb:
    intensity_lsb8: int


Datum = Union[
    TsMsb, EventY, MixedXMsb, MixedXLsb, EventX, VecXMsb, VecXLsb,
    VecIntensityMsb, VecIntensityLsb,
]

# (ON code, OFF code) for the polarity-carrying variants
_POLAR_CODES = {
    MixedXMsb: (DatumCode.MIXED_X_ON_MSB, DatumCode.MIXED_X_OFF_MSB),
    EventX: (DatumCode.EVENT_X_ON, DatumCode.EVENT_X_OFF),
    VecXMsb: (DatumCode.VEC_X_ON_MSB, DatumCode.VEC_X_OFF_MSB),
}
_PLAIN_CODES = {
    TsMsb: DatumCode.TS_MSB,
    EventY: DatumCode.EVENT_Y,
    MixedXLsb: DatumCode.MIXED_X_LSB,
    VecXLsb: DatumCode.VEC_X_LSB,
    VecIntensityMsb: DatumCode.VEC_X_INTENSITY_MSB,
    VecIntensityLsb: DatumCode.VEC_X_INTENSITY_LSB,
}


def datum_code(datum: Datum) -> DatumCode:
    """Return the code byte for ``datum``."""
    cls = type(datum)
    if cls in _PLAIN_CODES:
        return _PLAIN_CODES[cls]
    on, off = _POLAR_CODES[cls]
    return on if datum.polarity == Polarity.ON else off


def _check(name: str, value: int, bits: int) -> int:
    if not isinstance(value, int) or value < 0 or value >> bits:
        raise FieldOverflow(f"{name}={value!r} does not fit in {bits} bits")
    return value


def _check_polarity(value) -> int:
    if value not in (0, 1):
        raise FieldOverflow(f"polarity={value!r} is neither ON nor OFF")
    return int(value)


def encode_word(datum: Datum) -> int:
    """Pack one datum into its 32-bit word."""
    cls = type(datum)
    if cls is TsMsb:
        payload = _check("ts_msb", datum.ts_msb, 24)
    elif cls is EventY:
        payload = _check("y", datum.y, 16) << 8 | _check("ts_lsb", datum.ts_lsb, 8)
    elif cls is EventX:
        _check_polarity(datum.polarity)
        payload = _check("x", datum.x, 16) << 8 | _check("ts_llsb", datum.ts_llsb, 8)
    elif cls is MixedXMsb:
        _check_polarity(datum.polarity)
        payload = (_check("x", datum.x, 16) << 8
                   | _check("intensity_msb", datum.intensity_msb, 8))
    elif cls is VecXMsb:
        _check_polarity(datum.polarity)
        payload = _check("root_x", datum.root_x, 16) << 8 | _check("onehot8", datum.onehot8, 8)
    elif cls is MixedXLsb:
        payload = _check("intensity_lsb24", datum.intensity_lsb24, 24)
    elif cls is VecXLsb:
        payload = _check("onehot24", datum.onehot24, 24)
    elif cls is VecIntensityMsb:
        payload = _check("intensity_msb24", datum.intensity_msb24, 24)
    elif cls is VecIntensityLsb:
        payload = _check("intensity_lsb8", datum.intensity_lsb8, 8) << 16
    else:
        raise TypeError(f"not a datum: {datum!r}")
    return datum_code(datum) << 24 | payload


def decode_word(word: int, strict: bool = True) -> Datum:
    """Unpack a 32-bit word.

    Raises UnknownDatumCode for code bytes outside 0x01..0x0C and, when
    ``strict``, NonzeroPadding for a VEC X INTENSITY LSB word whose unused
    low 16 bits are set.
    """
    if not 0 <= word <= 0xFFFFFFFF:
        raise FieldOverflow(f"word {word!r} is not a 32-bit value")
    code = word >> 24
    addr = (word >> 8) & 0xFFFF
    low8 = word & 0xFF
    low24 = word & 0xFFFFFF
    if code == DatumCode.TS_MSB:
        return TsMsb(low24)
    if code == DatumCode.EVENT_Y:
        return EventY(addr, low8)
    if code == DatumCode.EVENT_X_ON or code == DatumCode.EVENT_X_OFF:
        return EventX(Polarity(code == DatumCode.EVENT_X_ON), addr, low8)
    if code == DatumCode.MIXED_X_ON_MSB or code == DatumCode.MIXED_X_OFF_MSB:
        return MixedXMsb(Polarity(code == DatumCode.MIXED_X_ON_MSB), addr, low8)
    if code == DatumCode.MIXED_X_LSB:
        return MixedXLsb(low24)
    if code == DatumCode.VEC_X_ON_MSB or code == DatumCode.VEC_X_OFF_MSB:
        return VecXMsb(Polarity(code == DatumCode.VEC_X_ON_MSB), addr, low8)
    if code == DatumCode.VEC_X_LSB:
        return VecXLsb(low24)
    if code == DatumCode.VEC_X_INTENSITY_MSB:
        return VecIntensityMsb(low24)
    if code == DatumCode.VEC_X_INTENSITY_LSB:
        if strict and word & 0xFFFF:
            raise NonzeroPadding(f"padding bits 0x{word & 0xFFFF:04X} in 0x{word:08X}")
        return VecIntensityLsb((word >> 16) & 0xFF)
    raise UnknownDatumCode(f"code 0x{code:02X} in word 0x{word:08X}")


def code_name(code: int) -> str:
    try:
        return DatumCode(code).name
    except ValueError:
        return f"UNKNOWN_0x{code:02X}"


def to_words(items: Iterable[int | Datum]) -> list[int]:
    """Normalise a mix of raw words and datum objects to raw words."""
    return [w if isinstance(w, int) else encode_word(w) for w in items]


def pack_words(words: Iterable[int]) -> bytes:
    words = list(words)
    return struct.pack(f">{len(words)}I", *words)


def unpack_words(data: bytes) -> list[int]:
    """Big-endian bytes to words; ``len(data)`` must be a multiple of 4."""
    n = len(data) // WORD_BYTES
    if n * WORD_BYTES != len(data):
        raise ValueError(f"{len(data)} bytes is not a whole number of words")
    return list(struct.unpack(f">{n}I", data))
