"""Deterministic synthetic event streams for tests and bandwidth studies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decoder import EventRecord, gc_paused
from .errors import BadParams
from .wire import Polarity

SCENARIOS = ("moving-edge", "uniform-poisson", "row-burst")


@dataclass
class GenParams:
    rows: int = 64
    cols: int = 128
    duration_us: int = 100_000
    seed: int = 0
    # uniform-poisson: events per second; row-burst: bursts per second
    rate: float = 100_000.0
    # moving-edge: pixels per second
    speed: float = 2_000.0
    edge_width: int = 8
    jitter_us: int = 50
    run_length: int | tuple[int, int] = 32
    noise_fraction: float = 0.0
    with_intensity: bool = False


def ramp_intensity(x: int, y: int, t: int) -> int:
    """Stand-in pixel intensity: a wrapping ramp over x + y + t that touches all four bytes."""
    return ((x + y + t) * 0x01010101) & 0xFFFFFFFF


def _finish(x, y, p, t, params: GenParams) -> list[EventRecord]:
    order = np.lexsort((p, x, y, t))
    x, y, p, t = (a[order].tolist() for a in (x, y, p, t))
    with gc_paused(len(x)):
        return _records(x, y, p, t, params.with_intensity)


def _records(x, y, p, t, with_intensity):
    pol = (Polarity.OFF, Polarity.ON)
    new = tuple.__new__
    if with_intensity:
        return [new(EventRecord, (xi, yi, pol[pi], ti, ramp_intensity(xi, yi, ti)))
                for xi, yi, pi, ti in zip(x, y, p, t)]
    return [new(EventRecord, (xi, yi, pol[pi], ti, None)) for xi, yi, pi, ti in zip(x, y, p, t)]


def _moving_edge(rng, p: GenParams):
    # leading edge crosses column c at time c / speed; the trailing edge follows edge_width behind
    sweep_us = 1e6 / p.speed
    n_cross = int(p.duration_us / sweep_us) + 1
    xs, ys, ps, ts = [], [], [], []
    for k in range(n_cross):
        t_cross = k * sweep_us
        rows = np.arange(p.rows)
        t = np.floor(t_cross + rng.integers(0, p.jitter_us + 1, p.rows)).astype(np.int64)
        lead = k % p.cols
        xs.append(np.full(p.rows, lead)); ys.append(rows); ps.append(np.ones(p.rows, np.int64))
        ts.append(t)
        if k >= p.edge_width:
            trail = (k - p.edge_width) % p.cols
            t2 = np.floor(t_cross + rng.integers(0, p.jitter_us + 1, p.rows)).astype(np.int64)
            xs.append(np.full(p.rows, trail)); ys.append(rows); ps.append(np.zeros(p.rows, np.int64))
            ts.append(t2)
    x, y, pol, t = (np.concatenate(a) for a in (xs, ys, ps, ts))
    keep = t < p.duration_us
    return x[keep], y[keep], pol[keep], t[keep]


def _uniform_poisson(rng, p: GenParams):
    expected = p.rate * p.duration_us / 1e6
    gaps = rng.exponential(1e6 / p.rate, int(expected + 10 * np.sqrt(expected) + 10))
    t = np.floor(np.cumsum(gaps)).astype(np.int64)
    t = t[t < p.duration_us]
    n = len(t)
    return (rng.integers(0, p.cols, n), rng.integers(0, p.rows, n),
            rng.integers(0, 2, n), t)


def _row_burst(rng, p: GenParams):
    # bursts sit at least 256 us apart so no two share a default vectorization bin
    lo, hi = (p.run_length, p.run_length) if isinstance(p.run_length, int) else p.run_length
    if not 1 <= lo <= hi <= p.cols:
        raise BadParams(f"run length {p.run_length} does not fit {p.cols} columns")
    gap_mean = max(1e6 / p.rate - 256, 0)
    n_max = p.duration_us // 256 + 1
    t = np.floor(np.cumsum(256 + rng.exponential(gap_mean, n_max))).astype(np.int64)
    t = t[t < p.duration_us]
    n = len(t)
    run = rng.integers(lo, hi + 1, n)
    start = np.floor(rng.random(n) * (p.cols - run + 1)).astype(np.int64)
    row = rng.integers(0, p.rows, n)
    pol = rng.integers(0, 2, n)
    first = np.repeat(np.cumsum(run) - run, run)
    x = np.repeat(start, run) + np.arange(run.sum()) - first
    y, pol, tt = np.repeat(row, run), np.repeat(pol, run), np.repeat(t, run)
    n_noise = int(round(p.noise_fraction * len(x)))
    if n_noise:
        x = np.concatenate([x, rng.integers(0, p.cols, n_noise)])
        y = np.concatenate([y, rng.integers(0, p.rows, n_noise)])
        pol = np.concatenate([pol, rng.integers(0, 2, n_noise)])
        tt = np.concatenate([tt, rng.integers(0, p.duration_us, n_noise)])
    return x, y, pol, tt


def generate(scenario: str, params: GenParams | None = None, **overrides) -> list[EventRecord]:
    """Events sorted by ``(t_us, y, x, polarity)``; identical for identical seeds."""
    p = params or GenParams()
    if overrides:
        p = GenParams(**{**p.__dict__, **overrides})
    if p.rows < 1 or p.cols < 1 or p.rows > 0x10000 or p.cols > 0x10000:
        raise BadParams(f"bad sensor size {p.rows}x{p.cols}")
    if p.duration_us < 0:
        raise BadParams(f"negative duration {p.duration_us}")
    if p.duration_us == 0:
        return []
    rng = np.random.default_rng(p.seed)
    if scenario == "moving-edge":
        if p.speed <= 0 or p.edge_width < 1:
            raise BadParams("moving-edge needs speed > 0 and edge_width >= 1")
        arrays = _moving_edge(rng, p)
    elif scenario == "uniform-poisson":
        if p.rate <= 0:
            raise BadParams("uniform-poisson needs rate > 0")
        arrays = _uniform_poisson(rng, p)
    elif scenario == "row-burst":
        if p.rate <= 0:
            raise BadParams("row-burst needs rate > 0")
        arrays = _row_burst(rng, p)
    else:
        raise BadParams(f"unknown scenario {scenario!r}; choose from {', '.join(SCENARIOS)}")
    return _finish(*arrays, p)
