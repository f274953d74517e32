import io

import pytest
from hypothesis import given, settings, strategies as st

from evtplus.container import RecordingReader, Segment, decode_recording, read_recording, write_recording
from evtplus.encoder import EncodeConfig, encode_payload
from evtplus.errors import BadHeaderId, CountMismatch, ModalityViolation, TrailingGarbage, Truncated
from evtplus.genstream import generate
from evtplus.header import HeaderRecord, PointerTable, encode_header
from evtplus.index import build_pointer_table
from evtplus.wire import EventX, EventY, Polarity, TsMsb, to_words

WORDS = to_words([TsMsb(0), EventY(0, 0), EventX(Polarity.ON, 1, 2)])


def hdr(n, **kw):
    kw.setdefault("rows", 4)
    kw.setdefault("cols", 4)
    return HeaderRecord(num_datum=n, **kw)


def test_one_segment_layout():
    data = write_recording([(hdr(3), WORDS)])
    assert len(data) == 69 + 12
    assert data[69:] == b"".join(w.to_bytes(4, "big") for w in WORDS)
    segs = read_recording(data)
    assert segs == [Segment(hdr(3), WORDS, 69)]


def test_no_segments():
    assert write_recording([]) == b""
    assert read_recording(b"") == []


def test_two_segments_round_trip():
    h2 = hdr(0, data_modality=6, sensor_model="second", rows=8, cols=8)
    data = write_recording([(hdr(3), WORDS), (h2, WORDS + WORDS)])
    segs = read_recording(data)
    assert [s.words for s in segs] == [WORDS, WORDS + WORDS]
    assert segs[1].header == h2
    events, diags = decode_recording(data)
    assert diags == [] and len(events) == 3


def test_count_mismatch():
    with pytest.raises(CountMismatch):
        write_recording([(hdr(2), WORDS)])
    with pytest.raises(CountMismatch):
        write_recording([(hdr(0), WORDS), (hdr(3), WORDS)])
    with pytest.raises(CountMismatch):
        write_recording([(hdr(0), []), (hdr(3), WORDS)])


def test_pointer_table_is_built():
    events = generate("uniform-poisson", duration_us=20_000, rate=50_000, rows=4, cols=4)
    words = encode_payload(events, EncodeConfig(4, sync_us=1000))
    data = write_recording([(hdr(len(words), pointer_table=PointerTable(1000)), words)])
    (seg,) = read_recording(data)
    assert seg.header.pointer_table == build_pointer_table(words, 1000, 4)
    assert len(seg.header.pointer_table) >= 19


def test_strict_read_errors():
    data = write_recording([(hdr(3), WORDS)])
    with pytest.raises(Truncated):
        read_recording(data[:-1])
    with pytest.raises(Truncated):
        read_recording(data[:40])
    with pytest.raises(TrailingGarbage) as info:
        read_recording(data + b"\x00\x00")
    assert info.value.offset == len(data)
    with pytest.raises(BadHeaderId):
        read_recording(b"\x00" + data[1:])
    with pytest.raises(TrailingGarbage):
        read_recording(write_recording([(hdr(0), WORDS)]) + b"\x01")


def test_lenient_read_collects():
    data = write_recording([(hdr(3), WORDS)])
    reader = RecordingReader(io.BytesIO(data[:-2]), strict=False)
    segs = list(reader)
    assert [d.code for d in reader.diagnostics] == ["Truncated"]
    assert segs[0].words == WORDS[:2]
    events, diags = decode_recording(data + b"\x00" * 3, strict=False)
    assert len(events) == 1 and [d.code for d in diags] == ["TrailingGarbage"]


def test_non_event_segment():
    data = encode_header(hdr(0, data_modality=1))
    with pytest.raises(ModalityViolation):
        decode_recording(data)
    assert [d.code for d in decode_recording(data, strict=False)[1]] == ["ModalityViolation"]


def test_diagnostic_offsets_are_file_offsets():
    bad = to_words([TsMsb(0), EventX(Polarity.ON, 1, 1)])
    data = write_recording([(hdr(3), WORDS), (hdr(2), bad)])
    _, diags = decode_recording(data, strict=False)
    assert [(d.code, d.offset) for d in diags] == [("MissingRow", 69 + 12 + 69 + 4)]


def test_incremental_reader():
    data = write_recording([(hdr(3), WORDS)] * 3)

    class OneByteAtATime(io.RawIOBase):
        def __init__(self, b):
            self.buf = io.BytesIO(b)

        def read(self, n=-1):
            return self.buf.read(n)

        def seek(self, *a):
            raise AssertionError("reader must not seek")

    assert len(list(RecordingReader(OneByteAtATime(data)))) == 3


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(0, 0xFFFFFFFF), min_size=1, max_size=20), max_size=4),
       st.booleans())
def test_round_trip_property(payloads, open_ended):
    segs = [(HeaderRecord(data_modality=0, num_datum=len(p)), p) for p in payloads]
    if open_ended and segs:
        segs[-1] = (HeaderRecord(data_modality=0, num_datum=0), segs[-1][1])
    out = read_recording(write_recording(segs))
    assert [(s.header, s.words) for s in out] == segs
