"""``evtplus`` command line: encode, decode, inspect, stats, seek, gen."""

from __future__ import annotations

import argparse
import csv
import sys
from collections import Counter
from contextlib import nullcontext

from . import __version__
from .container import decode_recording, read_recording, write_recording
from .decoder import EventRecord, iter_events
from .encoder import EncodeConfig, VectorPolicy, canonical_key, count_x_words, encode_payload
from .errors import Diagnostic, EvtError
from .genstream import SCENARIOS, GenParams, generate
from .header import EVENT_MODALITIES, MAX_NUM_DATUM, NO_DATA, DataModality, HeaderRecord, PointerTable
from .index import events_from, first_event_time, interval_index
from .wire import Polarity, code_name

MODES = {
    "baseline": DataModality.EVENT,
    "mixed": DataModality.MIXED,
    "vectorized": DataModality.VECTORIZED,
    "mixed-vectorized": DataModality.MIXED_VECTORIZED,
}
CSV_FIELDS = ["t_us", "x", "y", "p", "intensity"]


class UsageError(Exception):
    pass


def read_csv(path: str) -> list[EventRecord]:
    events = []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or reader.fieldnames[:4] != CSV_FIELDS[:4]:
            raise UsageError(f"{path}: expected header line {','.join(CSV_FIELDS)}")
        for line, row in enumerate(reader, start=2):
            try:
                inten = row.get("intensity") or None
                events.append(EventRecord(int(row["x"]), int(row["y"]), Polarity(int(row["p"])),
                                          int(row["t_us"]), None if inten is None else int(inten)))
            except (TypeError, ValueError) as exc:
                raise UsageError(f"{path}:{line}: {exc}") from None
    return events


def write_csv(events, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for e in events:
        w.writerow([e.t_us, e.x, e.y, int(e.polarity), "" if e.intensity is None else e.intensity])


def _open_out(path: str | None):
    if path in (None, "-"):
        return nullcontext(sys.stdout)
    return open(path, "w", newline="")


def _event_line(e: EventRecord) -> str:
    inten = "" if e.intensity is None else e.intensity
    return f"t_us={e.t_us} x={e.x} y={e.y} p={int(e.polarity)} intensity={inten}"


def cmd_encode(args) -> int:
    events = sorted(read_csv(args.input), key=canonical_key)
    modality = MODES[args.mode]
    config = EncodeConfig(modality, args.vector_policy, args.bin_us, sync_us=args.ptr_increment_us)
    if not config.mixed and any(e.intensity is not None for e in events):
        print(f"warning: {args.mode} payloads carry no intensity; dropping it", file=sys.stderr)
        events = [e._replace(intensity=None) for e in events]
    words = encode_payload(events, config)
    rows = args.rows or max((e.y for e in events), default=0) + 1
    cols = args.cols or max((e.x for e in events), default=0) + 1
    header = HeaderRecord(
        data_modality=modality,
        num_datum=len(words) if len(words) <= MAX_NUM_DATUM else 0,
        rows=rows, cols=cols,
        sensor_model=args.sensor_model,
        pointer_table=PointerTable(args.ptr_increment_us),
    )
    with open(args.output, "wb") as f:
        f.write(write_recording([(header, words)]))
    print(f"{len(events)} events -> {len(words)} words ({args.mode})", file=sys.stderr)
    return 0


def _report(diags: list[Diagnostic]) -> None:
    for d in diags:
        print(d, file=sys.stderr)


def cmd_decode(args) -> int:
    with open(args.input, "rb") as f:
        data = f.read()
    strict = not args.lenient
    if args.from_us is None and args.to_us is None:
        events, diags = decode_recording(data, strict)
    else:
        events, diags = [], []
        lo = args.from_us if args.from_us is not None else 0
        hi = args.to_us
        for seg in read_recording(data, strict):
            h = seg.header
            if h.data_modality not in EVENT_MODALITIES:
                continue
            for e in events_from(h.pointer_table, seg.words, lo, h.data_modality, strict):
                if hi is not None and e.t_us > hi:
                    break
                events.append(e)
    _report(diags)
    with _open_out(args.output) as out:
        write_csv(sorted(events, key=canonical_key), out)
    return 0


def cmd_inspect(args) -> int:
    with open(args.input, "rb") as f:
        segments = read_recording(f.read(), strict=False)
    for k, seg in enumerate(segments):
        h = seg.header
        try:
            dm = DataModality(h.data_modality).name
        except ValueError:
            dm = "RESERVED"
        print(f"segment {k} (payload at byte {seg.payload_offset})")
        print(f"  header_id: 0x{h.header_id:02X}")
        print(f"  epoch_ts: {h.epoch_ts}")
        print(f"  global_ts: {h.global_ts}")
        print(f"  sensor_modality: {h.sensor_modality}")
        print(f"  data_modality: {h.data_modality} ({dm})")
        print(f"  num_datum: {h.num_datum} (payload words: {len(seg.words)})")
        print(f"  rows: {h.rows}")
        print(f"  cols: {h.cols}")
        print(f"  reserved: 0x{h.reserved:016X}")
        print(f'  sensor_model: "{h.sensor_model}"')
        print(f"  user_words: {len(h.user_words)}")
        for i, w in enumerate(h.user_words):
            print(f"    [{i}] 0x{w:08X}")
        table = h.pointer_table
        print(f"  pointers: {len(table)} every {table.increment_us} us")
        for i, off in enumerate(table.offsets):
            print(f"    ptr{i}: " + ("none" if off == NO_DATA else str(off)))
    return 0


def cmd_stats(args) -> int:
    with open(args.input, "rb") as f:
        data = f.read()
    segments = read_recording(data, strict=not args.lenient)
    events, diags = decode_recording(data, strict=not args.lenient)
    _report(diags)
    words = [w for seg in segments for w in seg.words]
    hist = Counter(w >> 24 for w in words)
    x_words = count_x_words(words)
    baseline = encode_payload(sorted((e._replace(intensity=None) for e in events),
                                     key=canonical_key))
    base_x = count_x_words(baseline)
    print(f"segments: {len(segments)}")
    print(f"total_words: {len(words)}")
    print(f"events: {len(events)}")
    for code in sorted(hist):
        print(f"  {code_name(code)}: {hist[code]}")
    bpe = 32 * len(words) / len(events) if events else 0.0
    print(f"bits_per_event: {bpe:.3f}")
    print(f"x_words: {x_words}")
    print(f"baseline_x_words: {base_x}")
    ratio = base_x / x_words if x_words else 0.0
    print(f"x_word_compression: {ratio:.3f}")
    return 0


def cmd_seek(args) -> int:
    with open(args.input, "rb") as f:
        segments = read_recording(f.read(), strict=True)
    for k, seg in enumerate(segments):
        h = seg.header
        table = h.pointer_table
        if h.data_modality not in EVENT_MODALITIES or not table.offsets:
            continue
        t0 = first_event_time(table, seg.words, h.data_modality)
        end = t0 + len(table) * table.increment_us
        if args.at_us >= end and k < len(segments) - 1:
            continue
        i = interval_index(table, t0, args.at_us)
        if table.offsets[i] == NO_DATA:
            empty = i
            later = [j for j in range(i, len(table)) if table.offsets[j] != NO_DATA]
            i = later[0] if later else max(j for j in range(i) if table.offsets[j] != NO_DATA)
            print(f"note: interval {empty} holds no events; using interval {i}", file=sys.stderr)
        off = table.offsets[i]
        first = next(iter_events(seg.words, h.data_modality, start=off // 4))
        print(f"segment={k} interval={i} payload_offset={off} "
              f"file_offset={seg.payload_offset + off}")
        print(_event_line(first))
        return 0
    print("no indexed event segment in recording", file=sys.stderr)
    return 1


def cmd_gen(args) -> int:
    run = args.run_length
    if args.run_length_max is not None:
        run = (args.run_length, args.run_length_max)
    params = GenParams(rows=args.rows, cols=args.cols, duration_us=args.duration_us,
                       seed=args.seed, rate=args.rate, speed=args.speed,
                       run_length=run, noise_fraction=args.noise_fraction,
                       with_intensity=args.intensity)
    events = generate(args.scenario, params)
    with _open_out(args.output) as out:
        write_csv(events, out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="evtplus", description="EVT+ event data tools")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("encode", help="CSV events to an .evtp recording")
    s.add_argument("--input", required=True)
    s.add_argument("--output", required=True)
    s.add_argument("--mode", choices=list(MODES), default="baseline")
    s.add_argument("--vector-policy", choices=[v.value for v in VectorPolicy], default="adaptive")
    s.add_argument("--bin-us", type=int, default=256)
    s.add_argument("--rows", type=int)
    s.add_argument("--cols", type=int)
    s.add_argument("--sensor-model", default="")
    s.add_argument("--ptr-increment-us", type=int, default=1000)
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("decode", help=".evtp recording to CSV events")
    s.add_argument("--input", required=True)
    s.add_argument("--output", default="-")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--strict", action="store_true", default=True)
    g.add_argument("--lenient", action="store_true")
    s.add_argument("--from-us", type=int)
    s.add_argument("--to-us", type=int)
    s.set_defaults(func=cmd_decode)

    s = sub.add_parser("inspect", help="print headers and pointer tables")
    s.add_argument("--input", required=True)
    s.set_defaults(func=cmd_inspect)

    s = sub.add_parser("stats", help="datum histogram and compression figures")
    s.add_argument("--input", required=True)
    s.add_argument("--lenient", action="store_true")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("seek", help="resolve a time to a payload offset")
    s.add_argument("--input", required=True)
    s.add_argument("--at-us", type=int, required=True)
    s.set_defaults(func=cmd_seek)

    s = sub.add_parser("gen", help="synthetic CSV event streams")
    s.add_argument("--scenario", choices=SCENARIOS, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--rows", type=int, default=64)
    s.add_argument("--cols", type=int, default=128)
    s.add_argument("--duration-us", type=int, default=100_000)
    s.add_argument("--rate", type=float, default=100_000.0)
    s.add_argument("--speed", type=float, default=2_000.0)
    s.add_argument("--run-length", type=int, default=32)
    s.add_argument("--run-length-max", type=int)
    s.add_argument("--noise-fraction", type=float, default=0.0)
    s.add_argument("--intensity", action="store_true", help="add ramp intensities")
    s.add_argument("--output", default="-")
    s.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EvtError as exc:
        print(Diagnostic.from_error(exc), file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
