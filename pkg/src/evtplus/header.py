"""Segment header: the fixed 59-byte region, user words and pointer table.

Byte layout (big-endian throughout)::

    0       header id (0xEB)
    1..8    epoch timestamp, 64 bits
    9..11   global timestamp, 24 bits
    12..14  sensor modality (3) | data modality (3) | datum count (18)
    15..16  rows
    17..18  cols
    19..26  reserved, zero
    27..58  sensor model, 32 ASCII bytes, space padded
    59..60  user word count N
    ...     N user words
    ...     pointer count P, increment in microseconds, P byte offsets
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import IntEnum

from .errors import (
    BadHeaderId, FieldOverflow, InvalidHeader, NonAsciiModel, ReservedNonzero, Truncated,
)

HEADER_ID = 0xEB
REQUIRED_BYTES = 59
MODEL_BYTES = 32
NO_DATA = 0xFFFFFFFF
MAX_NUM_DATUM = (1 << 18) - 1

_REQUIRED = struct.Struct(">BQ3s3sHHQ32s")
assert _REQUIRED.size == REQUIRED_BYTES


class SensorModality(IntEnum):
    EVENT_ONLY = 0
    EVENT_FRAMING = 1
    TWO_COLOR_EVENT_FRAMING = 2


class DataModality(IntEnum):
    FRAMES = 1
    EVENT_INTEGRATION = 2
    EVENT_DT = 3
    EVENT = 4
    MIXED = 5
    VECTORIZED = 6
    MIXED_VECTORIZED = 7


EVENT_MODALITIES = frozenset(
    {DataModality.EVENT, DataModality.MIXED, DataModality.VECTORIZED, DataModality.MIXED_VECTORIZED}
)


@dataclass
class PointerTable:
    """Byte offsets, relative to the first payload byte, of the TS MSB word
    opening each ``increment_us`` interval. ``NO_DATA`` marks empty intervals."""

    increment_us: int = 0
    offsets: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.offsets)

    def validate(self, base: int | None = None) -> None:
        """Check the offset invariants; ``base`` is the byte position of the
        first offset when reporting errors from parsed data."""
        _check("increment_us", self.increment_us, 32)
        last = -1
        for k, off in enumerate(self.offsets):
            _check(f"offsets[{k}]", off, 32)
            if off == NO_DATA:
                continue
            if off % 4 or off <= last:
                raise InvalidHeader(f"pointer {k} = {off} is misaligned or not increasing",
                                    None if base is None else base + 4 * k)
            last = off


@dataclass
class HeaderRecord:
    epoch_ts: int = 0
    global_ts: int = 0
    sensor_modality: int = SensorModality.EVENT_ONLY
    data_modality: int = DataModality.EVENT
    num_datum: int = 0
    rows: int = 1
    cols: int = 1
    sensor_model: str = ""
    user_words: list[int] = field(default_factory=list)
    pointer_table: PointerTable = field(default_factory=PointerTable)
    reserved: int = 0
    header_id: int = HEADER_ID

    def __post_init__(self):
        if len(self.sensor_model) < MODEL_BYTES:
            self.sensor_model = self.sensor_model.ljust(MODEL_BYTES)

    @property
    def size(self) -> int:
        return REQUIRED_BYTES + 2 + 4 * len(self.user_words) + 8 + 4 * len(self.pointer_table)


def _check(name: str, value: int, bits: int) -> int:
    if not isinstance(value, int) or value < 0 or value >> bits:
        raise FieldOverflow(f"{name}={value!r} does not fit in {bits} bits")
    return value


def encode_header(h: HeaderRecord, strict: bool = True) -> bytes:
    if h.header_id != HEADER_ID:
        raise InvalidHeader(f"header_id must be 0x{HEADER_ID:02X}, got {h.header_id!r}")
    _check("epoch_ts", h.epoch_ts, 64)
    _check("global_ts", h.global_ts, 24)
    _check("sensor_modality", h.sensor_modality, 3)
    _check("data_modality", h.data_modality, 3)
    _check("num_datum", h.num_datum, 18)
    _check("rows", h.rows, 16)
    _check("cols", h.cols, 16)
    _check("reserved", h.reserved, 64)
    if strict and h.reserved:
        raise ReservedNonzero(f"reserved bits 0x{h.reserved:016X}")
    if h.data_modality in EVENT_MODALITIES and (h.rows < 1 or h.cols < 1):
        raise InvalidHeader(f"event data needs rows, cols >= 1, got {h.rows}x{h.cols}")
    try:
        model = h.sensor_model.encode("latin-1")
    except UnicodeEncodeError:
        raise NonAsciiModel(f"sensor_model {h.sensor_model!r} is not byte text") from None
    if len(model) > MODEL_BYTES:
        raise FieldOverflow(f"sensor_model is {len(model)} bytes, limit {MODEL_BYTES}")
    if strict and any(b >= 0x80 for b in model):
        raise NonAsciiModel(f"sensor_model {h.sensor_model!r} is not ASCII")
    if len(h.user_words) > 0xFFFF:
        raise FieldOverflow(f"{len(h.user_words)} user words, limit 65535")
    for k, w in enumerate(h.user_words):
        _check(f"user_words[{k}]", w, 32)
    table = h.pointer_table
    table.validate()
    if len(table) > 0xFFFFFFFF:
        raise FieldOverflow("pointer count does not fit in 32 bits")

    packed = h.sensor_modality << 21 | h.data_modality << 18 | h.num_datum
    out = bytearray(_REQUIRED.pack(
        h.header_id, h.epoch_ts, h.global_ts.to_bytes(3, "big"), packed.to_bytes(3, "big"),
        h.rows, h.cols, h.reserved, model.ljust(MODEL_BYTES, b" "),
    ))
    out += struct.pack(f">H{len(h.user_words)}I", len(h.user_words), *h.user_words)
    out += struct.pack(f">II{len(table)}I", len(table), table.increment_us, *table.offsets)
    return bytes(out)


def decode_header(data: bytes, offset: int = 0, strict: bool = True) -> tuple[HeaderRecord, int]:
    """Parse a header starting at ``data[offset]``.

    Returns the record and the number of bytes it occupies, pointer table
    included.
    """
    view = memoryview(data)
    if len(view) - offset < 1:
        raise Truncated("no header byte", offset)
    if view[offset] != HEADER_ID:
        raise BadHeaderId(f"expected 0x{HEADER_ID:02X}, found 0x{view[offset]:02X}", offset)
    pos = offset
    if len(view) - pos < REQUIRED_BYTES:
        raise Truncated(f"required header needs {REQUIRED_BYTES} bytes, "
                        f"{len(view) - pos} available", offset)
    hid, epoch, gts, packed, rows, cols, reserved, model = _REQUIRED.unpack_from(view, pos)
    pos += REQUIRED_BYTES
    if strict and reserved:
        raise ReservedNonzero(f"reserved bits 0x{reserved:016X}", offset + 19)
    packed = int.from_bytes(packed, "big")

    def take(fmt: str, what: str):
        nonlocal pos
        size = struct.calcsize(fmt)
        if len(view) - pos < size:
            raise Truncated(f"{what} needs {size} bytes, {len(view) - pos} available", pos)
        vals = struct.unpack_from(fmt, view, pos)
        pos += size
        return vals

    (n_user,) = take(">H", "user word count")
    user_words = list(take(f">{n_user}I", f"{n_user} user words"))
    n_ptr, increment = take(">II", "pointer table size")
    if len(view) - pos < 4 * n_ptr:
        raise Truncated(f"{n_ptr} pointers need {4 * n_ptr} bytes, "
                        f"{len(view) - pos} available", pos)
    offsets = list(take(f">{n_ptr}I", "pointers"))
    if strict:
        if any(b >= 0x80 for b in model):
            raise NonAsciiModel(f"sensor_model {bytes(model)!r} is not ASCII", offset + 27)
        data_modality = (packed >> 18) & 0x7
        if data_modality in EVENT_MODALITIES and (rows < 1 or cols < 1):
            raise InvalidHeader(f"event data needs rows, cols >= 1, got {rows}x{cols}", offset + 15)
        PointerTable(increment, offsets).validate(base=pos - 4 * n_ptr)

    h = HeaderRecord(
        epoch_ts=epoch,
        global_ts=int.from_bytes(gts, "big"),
        sensor_modality=packed >> 21,
        data_modality=(packed >> 18) & 0x7,
        num_datum=packed & MAX_NUM_DATUM,
        rows=rows,
        cols=cols,
        sensor_model=model.decode("latin-1"),
        user_words=user_words,
        pointer_table=PointerTable(increment, offsets),
        reserved=reserved,
        header_id=hid,
    )
    return h, pos - offset
