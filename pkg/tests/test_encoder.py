import itertools

import pytest
from hypothesis import given, settings, strategies as st

from evtplus.costmodel import vector_word_cost
from evtplus.decoder import EventRecord, decode_payload
from evtplus.encoder import (
    EncodeConfig, Group, VectorPolicy, canonical_key, count_x_words, encode_payload,
    expected_decode, partition_row,
)
from evtplus.errors import FieldOverflow, MissingIntensity, UnexpectedIntensity, UnsortedInput
from evtplus.wire import (
    DatumCode, EventX, EventY, Polarity, TsMsb, VecXLsb, VecXMsb, decode_word, to_words,
)

from .conftest import event_lists

ON, OFF = Polarity.ON, Polarity.OFF


def ev(x, y=0, p=ON, t=0, i=None):
    return EventRecord(x, y, p, t, i)


def test_empty():
    for m in (4, 5, 6, 7):
        assert encode_payload([], EncodeConfig(m)) == []


def test_single_baseline_event():
    words = encode_payload([ev(5, 3, OFF, 0x123456789A)])
    assert [decode_word(w) for w in words] == [
        TsMsb(0x123456), EventY(3, 0x78), EventX(OFF, 5, 0x9A)]


def test_vector_example():
    events = [ev(x, 1, ON, 700) for x in (32, 34, 36, 38)]
    words = encode_payload(events, EncodeConfig(6, "vector"))
    assert [decode_word(w) for w in words] == [
        TsMsb(0), EventY(1, 2), VecXMsb(ON, 32, 0b01010101)]


def test_mixed_splits_8_24():
    words = encode_payload([ev(9, 0, ON, 0x1234, 0xAABBCCDD)], EncodeConfig(5))
    assert words[2:] == [0x0300_09AA, 0x05BBCCDD]


def test_mixed_vectorized_splits_24_8():
    events = [ev(x, 0, OFF, 0, 0xAABBCC00 + x) for x in range(10, 20)]
    words = encode_payload(events, EncodeConfig(7))
    body = words[2:]
    assert body[0] >> 24 == DatumCode.VEC_X_OFF_MSB
    assert body[1] >> 24 == DatumCode.VEC_X_LSB
    pairs = body[2:]
    assert len(pairs) == 20
    assert pairs[0] == 0x0BAABBCC and pairs[1] == 0x0C000000 | 10 << 16
    assert pairs[-1] == 0x0C000000 | 19 << 16


@pytest.mark.parametrize("cols, expect", [
    ([10], [Group(False, 10, (10,))]),
    (list(range(8)), [Group(True, 0, tuple(range(8)))]),
    ([0, 100], [Group(False, 0, (0,)), Group(False, 100, (100,))]),
    ([0, 31], [Group(False, 0, (0, 31))]),
    ([0, 20, 31], [Group(True, 0, (0, 20, 31))]),
    ([], []),
])
def test_partition_examples(cols, expect):
    assert partition_row(cols) == expect


def test_partition_span_cap_and_policies():
    cols = list(range(0, 120, 2))
    for policy in VectorPolicy:
        groups = partition_row(cols, policy)
        assert [c for g in groups for c in g.columns] == cols
        for g in groups:
            assert g.root == g.columns[0]
            assert g.columns[-1] - g.root < 56
        if policy is VectorPolicy.VECTOR:
            assert all(g.vectorized for g in groups)
        if policy is VectorPolicy.SERIAL:
            assert not any(g.vectorized for g in groups)
    assert [g.root for g in partition_row(cols)] == [0, 56, 112]


def _x_words(groups):
    return sum(vector_word_cost(g.columns[-1] - g.root + 1) if g.vectorized else len(g.columns)
               for g in groups)


def test_adaptive_matches_brute_force_small_window():
    # every subset of a 12-column window; the window fits one chain
    for n in range(1, 13):
        for cols in itertools.combinations(range(40, 52), n):
            best = min(len(cols), vector_word_cost(cols[-1] - cols[0] + 1))
            assert _x_words(partition_row(list(cols))) == best


def test_32_consecutive_columns_compress_16x():
    events = [ev(x, 0, ON, 0) for x in range(64, 96)]
    vec = encode_payload(events, EncodeConfig(6))
    base = encode_payload(events, EncodeConfig(4))
    assert count_x_words(vec) == 2
    assert count_x_words(base) == 32


def test_serial_vectorized_matches_baseline_structure():
    events = [ev(x, y, p, t) for t, y, x, p in
              [(0x10000, 0, 3, ON), (0x10000, 0, 9, OFF), (0x10000, 2, 1, ON), (0x20300, 1, 4, ON)]]
    base = encode_payload(events, EncodeConfig(4))
    serial = encode_payload(events, EncodeConfig(6, "serial"))
    assert serial == base  # llsb is zero throughout

    events = [e._replace(t_us=e.t_us + 0x47) for e in events]
    base = encode_payload(events, EncodeConfig(4))
    serial = encode_payload(events, EncodeConfig(6, "serial"))
    assert serial == [w & ~0xFF if w >> 24 in (6, 7) else w for w in base]


def test_binning_shares_bin_start():
    events = [ev(1, 0, ON, 1000), ev(2, 0, ON, 1100), ev(3, 0, ON, 1300)]
    got, _ = decode_payload(encode_payload(events, EncodeConfig(6, "serial")), 6)
    assert [e.t_us for e in got] == [768, 1024, 1280]
    got, _ = decode_payload(encode_payload(events, EncodeConfig(6, "serial", bin_us=1000)), 6)
    assert [e.t_us for e in got] == [768, 768, 768]


def test_repeat_pixel_in_bin_is_kept():
    events = [ev(4, 0, ON, 10), ev(4, 0, ON, 20), ev(5, 0, ON, 30)]
    got, _ = decode_payload(encode_payload(events, EncodeConfig(6)), 6)
    assert sorted(got, key=canonical_key) == expected_decode(events, EncodeConfig(6))
    assert len(got) == 3


def test_ts_msb_only_on_change():
    events = [ev(0, 0, ON, 0x10000 + k) for k in range(5)] + [ev(0, 0, ON, 0x20000)]
    words = encode_payload(events)
    assert sum(1 for w in words if w >> 24 == DatumCode.TS_MSB) == 2
    assert sum(1 for w in words if w >> 24 == DatumCode.EVENT_Y) == 2


def test_sync_interval_reopens_timestamp():
    events = [ev(0, 0, ON, t) for t in (100, 150, 1100, 1200, 3500)]
    words = encode_payload(events, EncodeConfig(4, sync_us=1000))
    ts_at = [i for i, w in enumerate(words) if w >> 24 == DatumCode.TS_MSB]
    assert len(ts_at) == 3
    assert decode_payload(words, 4)[0] == events


@pytest.mark.parametrize("bad, err", [
    ([ev(1, t=5), ev(1, t=4)], UnsortedInput),
    ([ev(2, t=5), ev(1, t=5)], UnsortedInput),
    ([ev(0x10000)], FieldOverflow),
    ([ev(0, t=1 << 40)], FieldOverflow),
    ([ev(0, i=7)], UnexpectedIntensity),
])
def test_errors_baseline(bad, err):
    with pytest.raises(err):
        encode_payload(bad, EncodeConfig(4))


def test_errors_mixed():
    with pytest.raises(MissingIntensity):
        encode_payload([ev(0)], EncodeConfig(5))
    with pytest.raises(FieldOverflow):
        encode_payload([ev(0, i=1 << 32)], EncodeConfig(7))


def test_config_validation():
    with pytest.raises(ValueError):
        EncodeConfig(3)
    with pytest.raises(ValueError):
        EncodeConfig(6, bin_us=0)
    with pytest.raises(ValueError):
        EncodeConfig(4, vector_policy="sometimes")


@settings(max_examples=150, deadline=None)
@given(st.data(), st.sampled_from([4, 5, 6, 7]), st.sampled_from(list(VectorPolicy)),
       st.sampled_from([1, 100, 256, 4096]))
def test_round_trip_property(data, mode, policy, bin_us):
    events = data.draw(event_lists(mixed=mode in (5, 7)))
    config = EncodeConfig(mode, policy, bin_us)
    words = encode_payload(events, config)
    got, diags = decode_payload(words, mode)
    assert diags == []
    assert sorted(got, key=canonical_key) == expected_decode(events, config)
    if mode == 4:
        assert got == events


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_vector_never_costs_more_than_serial(data):
    events = data.draw(event_lists(max_size=80, cols=200, rows=2, t_max=2000))
    adaptive = encode_payload(events, EncodeConfig(6, "adaptive"))
    serial = encode_payload(events, EncodeConfig(6, "serial"))
    vector = encode_payload(events, EncodeConfig(6, "vector"))
    assert count_x_words(adaptive) <= min(count_x_words(serial), count_x_words(vector))


def test_chain_words_decode_back():
    cols = [0, 7, 8, 31, 32, 55]
    words = encode_payload([ev(1000 + c) for c in cols], EncodeConfig(6, "vector"))
    assert [decode_word(w) for w in words[2:]] == [
        VecXMsb(ON, 1000, 0x81), VecXLsb(1 | 1 << 23), VecXLsb(1 | 1 << 23)]
    assert to_words([VecXLsb(1)]) == [0x0A000001]
