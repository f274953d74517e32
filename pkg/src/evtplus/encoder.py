"""Turn time-sorted events into datum words for the four event modalities."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import groupby
from typing import Iterable, NamedTuple, Sequence

from .costmodel import EVT_PLUS, VectorCostParams, extension_words, should_vectorize
from .decoder import EventRecord, gc_paused
from .errors import (
    FieldOverflow, MissingIntensity, UnexpectedIntensity, UnsortedInput,
)
from .header import DataModality
from .wire import DatumCode, Polarity

TS_LIMIT = 1 << 40


class VectorPolicy(str, Enum):
    SERIAL = "serial"
    VECTOR = "vector"
    ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class EncodeConfig:
    modality: DataModality = DataModality.EVENT
    vector_policy: VectorPolicy = VectorPolicy.ADAPTIVE
    # binning window for the vectorized modalities; 256 keeps bits 39..8 intact
    bin_us: int = 256
    # if set, open a fresh TS MSB word at the first event of every interval of
    # this length (measured from the first event) so a pointer table can land there
    sync_us: int | None = None
    cost: VectorCostParams = EVT_PLUS

    def __post_init__(self):
        object.__setattr__(self, "modality", DataModality(self.modality))
        object.__setattr__(self, "vector_policy", VectorPolicy(self.vector_policy))
        if self.modality not in _EVENT_MODES:
            raise ValueError(f"modality {self.modality!r} carries no events")
        if self.bin_us < 1:
            raise ValueError(f"bin_us must be >= 1, got {self.bin_us}")
        if self.sync_us is not None and self.sync_us < 1:
            raise ValueError(f"sync_us must be >= 1, got {self.sync_us}")

    @property
    def vectorized(self) -> bool:
        return self.modality in (DataModality.VECTORIZED, DataModality.MIXED_VECTORIZED)

    @property
    def mixed(self) -> bool:
        return self.modality in (DataModality.MIXED, DataModality.MIXED_VECTORIZED)


_EVENT_MODES = (DataModality.EVENT, DataModality.MIXED, DataModality.VECTORIZED,
                DataModality.MIXED_VECTORIZED)


class Group(NamedTuple):
    vectorized: bool
    root: int
    columns: tuple[int, ...]


def partition_row(columns: Sequence[int], policy: VectorPolicy = VectorPolicy.ADAPTIVE,
                  params: VectorCostParams = EVT_PLUS) -> list[Group]:
    """Split one row's ascending columns into chain-sized groups.

    A greedy scan opens a group at the lowest unclaimed column and keeps
    every column within ``params.max_span`` of it. Each group is then sent
    as one vector chain or as serial addresses according to ``policy``.
    """
    policy = VectorPolicy(policy)
    limit = params.max_span
    groups = []
    i, n = 0, len(columns)
    while i < n:
        root = columns[i]
        j = i + 1
        while j < n and columns[j] - root < limit:
            j += 1
        cols = tuple(columns[i:j])
        if policy is VectorPolicy.VECTOR:
            vec = True
        elif policy is VectorPolicy.SERIAL:
            vec = False
        else:
            vec = should_vectorize(cols, params)
        groups.append(Group(vec, root, cols))
        i = j
    return groups


def expected_decode(events: Iterable[EventRecord], config: EncodeConfig) -> list[EventRecord]:
    """What decoding ``encode_payload(events, config)`` gives back, in canonical order."""
    if config.modality is DataModality.EVENT:
        out = [e._replace(intensity=None) for e in events]
    elif config.modality is DataModality.VECTORIZED:
        out = [e._replace(t_us=_bin_start(e.t_us, config) & ~0xFF, intensity=None) for e in events]
    elif config.modality is DataModality.MIXED:
        out = [e._replace(t_us=e.t_us & ~0xFF) for e in events]
    else:
        out = [e._replace(t_us=_bin_start(e.t_us, config) & ~0xFF) for e in events]
    return sorted(out, key=canonical_key)


def canonical_key(e: EventRecord):
    return (e.t_us, e.y, e.x, e.polarity, -1 if e.intensity is None else e.intensity)


def _bin_start(t: int, config: EncodeConfig) -> int:
    return t - t % config.bin_us


class _Emitter:
    """Tracks the timestamp and row context already on the wire."""

    def __init__(self, out: list[int], sync_us: int | None):
        self.out = out
        self.msb = None
        self.row = None
        self.sync_us = sync_us
        self.t0 = None
        self.interval = None

    def context(self, t: int, y: int) -> None:
        msb = t >> 16
        lsb = (t >> 8) & 0xFF
        new_interval = False
        if self.sync_us is not None:
            if self.t0 is None:
                self.t0 = t
            k = (t - self.t0) // self.sync_us
            new_interval = k != self.interval
            self.interval = k
        if msb != self.msb or new_interval:
            self.out.append(DatumCode.TS_MSB << 24 | msb)
            self.msb = msb
            self.row = None
        if self.row != (y, lsb):
            self.out.append(DatumCode.EVENT_Y << 24 | y << 8 | lsb)
            self.row = (y, lsb)


def _validate(events: Sequence[EventRecord], config: EncodeConfig) -> None:
    prev = None
    mixed = config.mixed
    for k, e in enumerate(events):
        x, y, p, t, inten = e
        if not (0 <= x <= 0xFFFF and 0 <= y <= 0xFFFF):
            raise FieldOverflow(f"event {k}: address ({x}, {y}) exceeds 16 bits")
        if not 0 <= t < TS_LIMIT:
            raise FieldOverflow(f"event {k}: timestamp {t} exceeds 40 bits")
        if p not in (0, 1):
            raise FieldOverflow(f"event {k}: polarity {p!r}")
        if mixed:
            if inten is None:
                raise MissingIntensity(f"event {k} has no intensity")
            if not 0 <= inten <= 0xFFFFFFFF:
                raise FieldOverflow(f"event {k}: intensity {inten} exceeds 32 bits")
        elif inten is not None:
            raise UnexpectedIntensity(
                f"event {k} carries intensity but {config.modality.name} payloads drop it")
        key = (t, y, x)
        if prev is not None and key < prev:
            raise UnsortedInput(f"event {k} at (t={t}, y={y}, x={x}) precedes its predecessor")
        prev = key


def encode_payload(events: Sequence[EventRecord], config: EncodeConfig = EncodeConfig()) -> list[int]:
    """Encode events sorted by ``(t_us, y, x)`` into raw 32-bit words."""
    events = [e if isinstance(e, EventRecord) else EventRecord(*e) for e in events]
    _validate(events, config)
    with gc_paused(len(events)):
        return _encode(events, config)


def _encode(events: list[EventRecord], config: EncodeConfig) -> list[int]:
    out: list[int] = []
    em = _Emitter(out, config.sync_us)
    if not config.vectorized:
        mixed = config.mixed
        for x, y, p, t, inten in events:
            # mixed words drop bits 7..0, so sync intervals follow the truncated time
            em.context(t & ~0xFF if mixed else t, y)
            if mixed:
                code = DatumCode.MIXED_X_ON_MSB if p else DatumCode.MIXED_X_OFF_MSB
                out.append(code << 24 | x << 8 | inten >> 24)
                out.append(DatumCode.MIXED_X_LSB << 24 | (inten & 0xFFFFFF))
            else:
                code = DatumCode.EVENT_X_ON if p else DatumCode.EVENT_X_OFF
                out.append(code << 24 | x << 8 | (t & 0xFF))
        return out

    for b, in_bin in groupby(events, key=lambda e: _bin_start(e.t_us, config)):
        t_wire = b & ~0xFF
        rows: dict[int, list[EventRecord]] = {}
        for e in in_bin:
            rows.setdefault(e.y, []).append(e)
        for y in sorted(rows):
            em.context(t_wire, y)
            for pol in (Polarity.ON, Polarity.OFF):
                for layer in _layers([e for e in rows[y] if e.polarity == pol]):
                    _encode_layer(out, layer, pol, config)
    return out


def _layers(events: list[EventRecord]) -> list[list[EventRecord]]:
    """Split events into layers with at most one event per column each,
    ascending by column; repeat firings of a pixel inside one bin spill
    into later layers."""
    events = sorted(events, key=lambda e: e.x)
    if len({e.x for e in events}) == len(events):
        return [events] if events else []
    layers: list[list[EventRecord]] = []
    for _, same_x in groupby(events, key=lambda e: e.x):
        for depth, e in enumerate(same_x):
            if depth == len(layers):
                layers.append([])
            layers[depth].append(e)
    return layers


def _encode_layer(out: list[int], layer: list[EventRecord], pol: Polarity,
                  config: EncodeConfig) -> None:
    by_x = {e.x: e for e in layer}
    mixed = config.mixed
    for g in partition_row([e.x for e in layer], config.vector_policy, config.cost):
        if not g.vectorized:
            for x in g.columns:
                if mixed:
                    inten = by_x[x].intensity
                    code = DatumCode.MIXED_X_ON_MSB if pol else DatumCode.MIXED_X_OFF_MSB
                    out.append(code << 24 | x << 8 | inten >> 24)
                    out.append(DatumCode.MIXED_X_LSB << 24 | (inten & 0xFFFFFF))
                else:
                    code = DatumCode.EVENT_X_ON if pol else DatumCode.EVENT_X_OFF
                    out.append(code << 24 | x << 8)
            continue
        mask = 0
        for x in g.columns:
            mask |= 1 << (x - g.root)
        n_ext = extension_words(g.columns[-1] - g.root + 1, config.cost)
        code = DatumCode.VEC_X_ON_MSB if pol else DatumCode.VEC_X_OFF_MSB
        out.append(code << 24 | g.root << 8 | (mask & 0xFF))
        mask >>= 8
        for _ in range(n_ext):
            out.append(DatumCode.VEC_X_LSB << 24 | (mask & 0xFFFFFF))
            mask >>= 24
        if mixed:
            for x in g.columns:
                inten = by_x[x].intensity
                out.append(DatumCode.VEC_X_INTENSITY_MSB << 24 | inten >> 8)
                out.append(DatumCode.VEC_X_INTENSITY_LSB << 24 | (inten & 0xFF) << 16)


def count_x_words(words: Iterable[int]) -> int:
    """Words that carry column addresses or one-hot column bits."""
    x_codes = {DatumCode.EVENT_X_ON, DatumCode.EVENT_X_OFF, DatumCode.MIXED_X_ON_MSB,
               DatumCode.MIXED_X_OFF_MSB, DatumCode.VEC_X_ON_MSB, DatumCode.VEC_X_OFF_MSB,
               DatumCode.VEC_X_LSB}
    return sum(1 for w in words if w >> 24 in x_codes)
