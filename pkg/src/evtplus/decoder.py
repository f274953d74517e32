"""Streaming payload decoder.

Words are consumed one at a time by a small state machine that remembers
the latest TS MSB, the current row and whatever a multi-word datum group
still owes (the LSB half of a mixed event, the intensities of a mixed
vector chain). Events come out in wire order with their 40-bit timestamps
assembled.

In strict mode the first problem raises. In lenient mode each problem
becomes a :class:`~evtplus.errors.Diagnostic`, partial state is dropped and
decoding resumes at the next TS MSB or EVENT Y word.
"""

from __future__ import annotations

import gc
from collections import deque
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import (
    AddressOutOfRange, ColumnOverflow, DanglingMixedMsb, Diagnostic, EvtError,
    IntensityUnderrun, MissingRow, MissingTimestamp, ModalityViolation, NonzeroPadding,
    OrphanIntensity, OrphanVectorLsb, UnknownDatumCode,
)
from .header import DataModality
from .wire import DatumCode, Polarity, to_words

TIMESTAMP_BITS = 40
MAX_COLUMN = 0xFFFF

_POL = (Polarity.OFF, Polarity.ON)
_BIT_OFFSETS = tuple(tuple(i for i in range(8) if v >> i & 1) for v in range(256))

_LEGAL = {
    DataModality.EVENT: frozenset({1, 2, 6, 7}),
    DataModality.MIXED: frozenset({1, 2, 3, 4, 5}),
    DataModality.VECTORIZED: frozenset({1, 2, 6, 7, 8, 9, 10}),
    DataModality.MIXED_VECTORIZED: frozenset({1, 2, 3, 4, 5, 8, 9, 10, 11, 12}),
}


class EventRecord(NamedTuple):
    x: int
    y: int
    polarity: Polarity
    t_us: int
    intensity: int | None = None


def timestamp_range_seconds(resolution_s: float, bits: int = TIMESTAMP_BITS) -> float:
    """Wall-clock span addressable by a ``bits``-wide counter."""
    return (1 << bits) * resolution_s


@contextmanager
def gc_paused(n_items: int, threshold: int = 1 << 16):
    """Suspend the cyclic collector while building ``n_items`` cycle-free
    tuples; it otherwise rescans the growing result list many times over."""
    if n_items < threshold or not gc.isenabled():
        yield
        return
    gc.disable()
    try:
        yield
    finally:
        gc.enable()


def assemble_timestamp(ts_msb: int, ts_lsb: int, ts_llsb: int) -> int:
    return (ts_msb << 16) | (ts_lsb << 8) | ts_llsb


def _bits(value: int, base: int) -> list[int]:
    out = []
    while value:
        low = value & 0xFF
        if low:
            out.extend(base + i for i in _BIT_OFFSETS[low])
        value >>= 8
        base += 8
    return out


def expand_vector(root_x: int, onehot8: int, lsb_words: Sequence[int] = ()) -> list[int]:
    """Columns asserted by a vector chain, ascending.

    Bit ``i`` of the root word's one-hot byte is column ``root_x + i``; bit
    ``j`` of the ``k``-th chained word is column ``root_x + 8 + 24*k + j``.
    """
    cols = _bits(onehot8, root_x)
    for k, word in enumerate(lsb_words):
        cols.extend(_bits(word, root_x + 8 + 24 * k))
    if cols and cols[-1] > MAX_COLUMN:
        raise ColumnOverflow(f"vector rooted at {root_x} reaches column {cols[-1]}")
    return cols


@dataclass
class DecoderState:
    ts_msb: int | None = None
    current_y: int | None = None
    ts_lsb: int = 0
    # [root_x, polarity, lsb_word_count] of the open vector chain
    vector_ctx: list | None = None
    # (x, polarity, intensity_msb8) of a mixed event waiting for its LSB word
    pending_mixed: tuple | None = None
    pending_columns: deque = field(default_factory=deque)
    pending_intensity_msb: int | None = None
    resyncing: bool = False


class StreamDecoder:
    """Incremental decoder for one payload stream.

    ``feed`` may be called repeatedly with consecutive chunks; ``close``
    runs the end-of-payload checks.
    """

    def __init__(self, modality: int, strict: bool = True, *, rows: int | None = None,
                 cols: int | None = None, state: DecoderState | None = None,
                 base_offset: int = 0):
        try:
            self.modality = DataModality(modality)
            self._legal = _LEGAL[self.modality]
        except (ValueError, KeyError):
            raise ModalityViolation(f"data modality {modality} carries no event payload") from None
        self.strict = strict
        self.rows = rows
        self.cols = cols
        self.state = state if state is not None else DecoderState()
        self.offset = base_offset
        self.diagnostics: list[Diagnostic] = []

    def _report(self, err: EvtError, offset: int) -> None:
        if self.strict:
            err.offset = offset
            raise err
        self.diagnostics.append(Diagnostic.from_error(err, offset))

    def feed(self, words: Iterable[int]) -> list[EventRecord]:
        if not isinstance(words, (list, tuple)):
            words = to_words(words)
        with gc_paused(len(words)):
            return self._feed(words)

    def _feed(self, words: Sequence[int]) -> list[EventRecord]:
        st = self.state
        legal = self._legal
        mixed = self.modality in (DataModality.MIXED, DataModality.MIXED_VECTORIZED)
        rows, cols = self.rows, self.cols
        events: list[EventRecord] = []
        emit = events.append
        new = tuple.__new__
        ER = EventRecord
        pending_cols = st.pending_columns

        ts_msb = st.ts_msb
        y = st.current_y
        lsb = st.ts_lsb
        vec = st.vector_ctx
        pmixed = st.pending_mixed
        pint = st.pending_intensity_msb
        skipping = st.resyncing
        base_t = ((ts_msb or 0) << 16) | (lsb << 8)

        offset = self.offset
        n = len(words)
        i = 0
        while i < n:
            w = words[i]
            code = w >> 24
            try:
                if skipping:
                    if code != 1 and code != 2:
                        i += 1
                        continue
                    skipping = False
                if code not in legal:
                    if 1 <= code <= 12:
                        raise ModalityViolation(
                            f"{DatumCode(code).name} is illegal in {self.modality.name} payloads")
                    raise UnknownDatumCode(f"code 0x{code:02X} in word 0x{w:08X}")

                if pmixed is not None and code != 5:
                    pmixed = None
                    if code <= 2:
                        self._report(DanglingMixedMsb("mixed MSB word not followed by its LSB"),
                                     offset + 4 * i)
                    else:
                        raise DanglingMixedMsb("mixed MSB word not followed by its LSB")
                if (pending_cols or pint is not None) and code < 10:
                    n_owed = len(pending_cols)
                    pending_cols.clear()
                    pint = None
                    err = IntensityUnderrun(f"vector chain ended owing {n_owed} intensities")
                    if code <= 2:
                        self._report(err, offset + 4 * i)
                    else:
                        raise err

                if code == 6 or code == 7:
                    if y is None:
                        raise (MissingRow if ts_msb is not None else MissingTimestamp)(
                            "EVENT X before any row/timestamp")
                    vec = None
                    x = (w >> 8) & 0xFFFF
                    if cols is not None and x >= cols:
                        raise AddressOutOfRange(f"column {x} >= {cols}")
                    emit(new(ER, (x, y, _POL[code == 6], base_t | (w & 0xFF), None)))
                elif code == 1:
                    ts_msb = w & 0xFFFFFF
                    y = None
                    vec = None
                elif code == 2:
                    if ts_msb is None:
                        raise MissingTimestamp("EVENT Y before any TS MSB")
                    y = (w >> 8) & 0xFFFF
                    lsb = w & 0xFF
                    vec = None
                    base_t = (ts_msb << 16) | (lsb << 8)
                    if rows is not None and y >= rows:
                        y = None
                        raise AddressOutOfRange(f"row {(w >> 8) & 0xFFFF} >= {rows}")
                elif code == 8 or code == 9:
                    if y is None:
                        raise (MissingRow if ts_msb is not None else MissingTimestamp)(
                            "VEC X MSB before any row/timestamp")
                    root = (w >> 8) & 0xFFFF
                    pol = _POL[code == 8]
                    vec = [root, pol, 0]
                    xs = _bits(w & 0xFF, root)
                    if xs:
                        self._vector_columns(xs, pol, y, base_t, mixed, events, pending_cols)
                elif code == 10:
                    if vec is None:
                        raise OrphanVectorLsb("VEC X LSB without an open vector chain")
                    root, pol, k = vec
                    vec[2] = k + 1
                    xs = _bits(w & 0xFFFFFF, root + 8 + 24 * k)
                    if xs:
                        if xs[-1] > MAX_COLUMN:
                            vec = None
                            raise ColumnOverflow(f"chain rooted at {root} reaches column {xs[-1]}")
                        self._vector_columns(xs, pol, y, base_t, mixed, events, pending_cols)
                elif code == 3 or code == 4:
                    if y is None:
                        raise (MissingRow if ts_msb is not None else MissingTimestamp)(
                            "MIXED X MSB before any row/timestamp")
                    vec = None
                    pmixed = ((w >> 8) & 0xFFFF, _POL[code == 3], w & 0xFF)
                elif code == 5:
                    if pmixed is None:
                        raise OrphanIntensity("MIXED X LSB without its MSB word")
                    x, pol, hi = pmixed
                    pmixed = None
                    if cols is not None and x >= cols:
                        raise AddressOutOfRange(f"column {x} >= {cols}")
                    emit(new(ER, (x, y, pol, base_t, hi << 24 | (w & 0xFFFFFF))))
                elif code == 11:
                    vec = None
                    if pint is not None:
                        pint = None
                        raise OrphanIntensity("two intensity MSB words in a row")
                    if not pending_cols:
                        raise OrphanIntensity("intensity MSB with no asserted column waiting")
                    pint = w & 0xFFFFFF
                else:  # code == 12
                    if pint is None:
                        raise OrphanIntensity("intensity LSB without its MSB word")
                    if w & 0xFFFF and self.strict:
                        raise NonzeroPadding(f"padding bits 0x{w & 0xFFFF:04X}")
                    x, pol = pending_cols.popleft()
                    emit(new(ER, (x, y, pol, base_t, pint << 8 | ((w >> 16) & 0xFF))))
                    pint = None
            except EvtError as err:
                self._report(err, offset + 4 * i)
                pmixed = None
                pint = None
                vec = None
                pending_cols.clear()
                if not isinstance(err, AddressOutOfRange) or code == 2:
                    skipping = True
            i += 1

        st.ts_msb = ts_msb
        st.current_y = y
        st.ts_lsb = lsb
        st.vector_ctx = vec
        st.pending_mixed = pmixed
        st.pending_intensity_msb = pint
        st.resyncing = skipping
        self.offset = offset + 4 * n
        return events

    def _vector_columns(self, xs, pol, y, t, mixed, events, pending_cols):
        cols = self.cols
        if cols is not None and xs[-1] >= cols:
            raise AddressOutOfRange(f"column {xs[-1]} >= {cols}")
        if mixed:
            pending_cols.extend([(x, pol) for x in xs])
        else:
            new = tuple.__new__
            events.extend([new(EventRecord, (x, y, pol, t, None)) for x in xs])

    def close(self) -> None:
        st = self.state
        if st.pending_mixed is not None:
            st.pending_mixed = None
            self._report(DanglingMixedMsb("payload ends after a mixed MSB word"), self.offset)
        if st.pending_columns or st.pending_intensity_msb is not None:
            n_owed = len(st.pending_columns)
            st.pending_columns.clear()
            st.pending_intensity_msb = None
            self._report(IntensityUnderrun(f"payload ends owing {n_owed} intensities"),
                         self.offset)


def decode_payload(words: Iterable[int], modality: int, strict: bool = True, *,
                   rows: int | None = None, cols: int | None = None,
                   state: DecoderState | None = None,
                   base_offset: int = 0) -> tuple[list[EventRecord], list[Diagnostic]]:
    """Decode a complete payload. Returns ``(events, diagnostics)``."""
    dec = StreamDecoder(modality, strict, rows=rows, cols=cols, state=state,
                        base_offset=base_offset)
    events = dec.feed(words)
    dec.close()
    return events, dec.diagnostics


def iter_events(words: Sequence[int], modality: int, strict: bool = True, *,
                start: int = 0, chunk: int = 4096, **kwargs) -> Iterator[EventRecord]:
    """Lazily decode ``words[start:]`` in chunks; ``start`` is a word index."""
    dec = StreamDecoder(modality, strict, base_offset=4 * start, **kwargs)
    for lo in range(start, len(words), chunk):
        yield from dec.feed(words[lo:lo + chunk])
    dec.close()
