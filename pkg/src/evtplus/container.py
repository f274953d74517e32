"""Recordings: one or more (header, payload) segments back to back.

A new segment starts whenever the sensor is reconfigured. A header whose
datum count is zero claims every remaining word, so only the last segment
may use it.
"""

from __future__ import annotations

import io
import struct
from dataclasses import replace
from typing import BinaryIO, Iterable, Iterator, NamedTuple

from .decoder import EventRecord, StreamDecoder
from .errors import (
    CountMismatch, Diagnostic, EvtError, ModalityViolation, TrailingGarbage, Truncated,
)
from .header import (
    EVENT_MODALITIES, HEADER_ID, REQUIRED_BYTES, HeaderRecord, PointerTable, decode_header,
    encode_header,
)
from .index import build_pointer_table
from .wire import pack_words, to_words

FILE_SUFFIX = ".evtp"


class Segment(NamedTuple):
    header: HeaderRecord
    words: list[int]
    payload_offset: int = 0


def write_recording(segments: Iterable[tuple[HeaderRecord, Iterable]]) -> bytes:
    """Serialise segments, rebuilding each pointer table from its payload.

    A header's ``pointer_table.increment_us`` selects the indexing interval;
    zero leaves the table empty.
    """
    segments = [(h, to_words(ws)) for h, ws in segments]
    out = bytearray()
    for k, (h, words) in enumerate(segments):
        last = k == len(segments) - 1
        if h.num_datum != len(words) and not (last and h.num_datum == 0):
            raise CountMismatch(f"segment {k}: header declares {h.num_datum} words, "
                                f"payload has {len(words)}")
        if not words and not last:
            # a zero count means "to end of input", so it would swallow later segments
            raise CountMismatch(f"segment {k}: only the last segment may be empty")
        inc = h.pointer_table.increment_us
        if inc and h.data_modality in EVENT_MODALITIES:
            table = build_pointer_table(words, inc, h.data_modality)
        else:
            table = PointerTable(inc, [])
        out += encode_header(replace(h, pointer_table=table))
        out += pack_words(words)
    return bytes(out)


class RecordingReader:
    """Incremental segment reader over a binary stream.

    Only reads forward. In lenient mode problems are collected in
    ``diagnostics`` and reading stops at the first damaged header.
    """

    def __init__(self, stream: BinaryIO, strict: bool = True):
        self.stream = stream
        self.strict = strict
        self.diagnostics: list[Diagnostic] = []
        self.position = 0

    def _fail(self, err: EvtError) -> None:
        if self.strict:
            raise err
        self.diagnostics.append(Diagnostic.from_error(err))

    def _read(self, n: int) -> bytes:
        data = self.stream.read(n)
        self.position += len(data)
        return data

    def _read_header(self) -> HeaderRecord | None:
        start = self.position
        buf = self._read(REQUIRED_BYTES + 2)
        if not buf:
            return None
        if buf[0] != HEADER_ID and start > 0:
            raise TrailingGarbage("bytes after the last segment", start)
        if len(buf) == REQUIRED_BYTES + 2:
            (n_user,) = struct.unpack_from(">H", buf, REQUIRED_BYTES)
            buf += self._read(4 * n_user + 8)
            if len(buf) == REQUIRED_BYTES + 10 + 4 * n_user:
                (n_ptr,) = struct.unpack_from(">I", buf, REQUIRED_BYTES + 2 + 4 * n_user)
                buf += self._read(4 * n_ptr)
        try:
            h, _ = decode_header(buf, strict=self.strict)
        except EvtError as err:
            err.offset = start + (err.offset or 0)
            raise
        if not self.strict:
            # soft violations (reserved bits, model text, dimensions) are reported, not fatal
            try:
                decode_header(buf, strict=True)
            except EvtError as err:
                err.offset = start + (err.offset or 0)
                self.diagnostics.append(Diagnostic.from_error(err))
        return h

    def __iter__(self) -> Iterator[Segment]:
        while True:
            try:
                h = self._read_header()
            except EvtError as err:
                self._fail(err)
                return
            if h is None:
                return
            payload_start = self.position
            data = self._read(4 * h.num_datum if h.num_datum else -1)
            complete = True
            if h.num_datum and len(data) < 4 * h.num_datum:
                self._fail(Truncated(f"header declares {h.num_datum} words, "
                                     f"{len(data) // 4} present", payload_start))
                complete = False
            elif len(data) % 4:
                self._fail(TrailingGarbage(f"{len(data) % 4} stray bytes after the "
                                           f"last whole word", payload_start + len(data)))
            data = data[:len(data) - len(data) % 4]
            yield Segment(h, list(struct.unpack(f">{len(data) // 4}I", data)), payload_start)
            if not h.num_datum or not complete:
                return


def read_recording(data: bytes, strict: bool = True) -> list[Segment]:
    return list(RecordingReader(io.BytesIO(data), strict))


def decode_recording(data: bytes, strict: bool = True) -> tuple[list[EventRecord], list[Diagnostic]]:
    """Decode every segment's events; diagnostics carry file byte offsets."""
    reader = RecordingReader(io.BytesIO(data), strict)
    events: list[EventRecord] = []
    diagnostics: list[Diagnostic] = []
    for seg in reader:
        h = seg.header
        base = seg.payload_offset
        if h.data_modality not in EVENT_MODALITIES:
            err = ModalityViolation(f"data modality {h.data_modality} is not an event payload", base)
            if strict:
                raise err
            diagnostics.append(Diagnostic.from_error(err))
            continue
        dec = StreamDecoder(h.data_modality, strict, rows=h.rows, cols=h.cols, base_offset=base)
        events += dec.feed(seg.words)
        dec.close()
        diagnostics += dec.diagnostics
    diagnostics += reader.diagnostics
    diagnostics.sort(key=lambda d: d.offset)
    return events, diagnostics
