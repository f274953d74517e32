"""Pointer-to-timestamp table: random access into a payload by time."""

from __future__ import annotations

from typing import Iterator, Sequence

from .decoder import DecoderState, EventRecord, StreamDecoder, iter_events
from .errors import EvtError, SentinelInterval, UndecodablePayload
from .header import NO_DATA, PointerTable
from .wire import DatumCode


def _regions(words: Sequence[int], modality: int) -> Iterator[tuple[int, int]]:
    """Yield ``(word index, first event time)`` for every TS MSB word that
    is followed by at least one event before the next TS MSB word."""
    starts = [i for i, w in enumerate(words) if w >> 24 == DatumCode.TS_MSB]
    dec = StreamDecoder(modality, strict=True)
    try:
        if starts and starts[0] > 0:
            dec.feed(words[:starts[0]])
        for j, lo in enumerate(starts):
            hi = starts[j + 1] if j + 1 < len(starts) else len(words)
            events = dec.feed(words[lo:hi])
            if events:
                yield lo, events[0].t_us
        dec.close()
    except EvtError as err:
        raise UndecodablePayload(f"{err.code}: {err.detail}", err.offset) from err


def build_pointer_table(words: Sequence[int], increment_us: int, modality: int) -> PointerTable:
    """Index ``words`` at ``increment_us`` intervals starting from the first event.

    Entry ``k`` holds the byte offset of the first TS MSB word whose first
    event falls in ``[t0 + k*increment_us, t0 + (k+1)*increment_us)``, or
    ``NO_DATA`` when no TS MSB word opens inside that interval.
    """
    if increment_us < 1:
        raise ValueError(f"increment_us must be >= 1, got {increment_us}")
    regions = list(_regions(words, modality))
    if not regions:
        return PointerTable(increment_us, [])
    t0 = regions[0][1]
    last_t = _last_event_time(words, modality, regions[-1][0])
    offsets = [NO_DATA] * ((last_t - t0) // increment_us + 1)
    for idx, t in regions:
        k = (t - t0) // increment_us
        if offsets[k] == NO_DATA:
            offsets[k] = 4 * idx
    return PointerTable(increment_us, offsets)


def _last_event_time(words, modality, start: int) -> int:
    last = None
    for e in iter_events(words, modality, start=start):
        last = e.t_us
    return last


def first_event_time(table: PointerTable, words: Sequence[int], modality: int) -> int | None:
    if not table.offsets:
        return None
    return next(iter_events(words, modality, start=table.offsets[0] // 4)).t_us


def interval_index(table: PointerTable, t0: int, t_us: int) -> int:
    k = (t_us - t0) // table.increment_us
    return min(max(k, 0), len(table.offsets) - 1)


def seek(table: PointerTable, words: Sequence[int], t_us: int,
         modality: int) -> tuple[int, DecoderState]:
    """Locate the interval holding ``t_us``.

    Returns the payload byte offset to resume at and a fresh decoder state
    for it. Times before the first event clamp to the first interval and
    times past the table to the last populated one.
    """
    if not table.offsets:
        raise SentinelInterval("empty pointer table")
    t0 = first_event_time(table, words, modality)
    k = interval_index(table, t0, t_us)
    if t_us >= t0 + len(table.offsets) * table.increment_us:
        while table.offsets[k] == NO_DATA:
            k -= 1
    off = table.offsets[k]
    if off == NO_DATA:
        raise SentinelInterval(f"no events in interval {k} "
                               f"[{t0 + k * table.increment_us}, "
                               f"{t0 + (k + 1) * table.increment_us})")
    return off, DecoderState()


def interval_start(table: PointerTable, t0: int, t_us: int) -> int:
    return t0 + interval_index(table, t0, t_us) * table.increment_us


def events_from(table: PointerTable, words: Sequence[int], t_us: int, modality: int,
                strict: bool = True) -> Iterator[EventRecord]:
    """Events with timestamp >= ``t_us``, starting from the nearest pointer at
    or before it. Empty intervals fall back to the next populated one."""
    if not table.offsets:
        yield from (e for e in iter_events(words, modality, strict) if e.t_us >= t_us)
        return
    t0 = first_event_time(table, words, modality)
    k = interval_index(table, t0, t_us)
    while k < len(table.offsets) and table.offsets[k] == NO_DATA:
        k += 1
    start = table.offsets[k] // 4
    state = DecoderState()
    for e in iter_events(words, modality, strict, start=start, state=state):
        if e.t_us >= t_us:
            yield e
