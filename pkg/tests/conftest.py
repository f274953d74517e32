import pytest
from hypothesis import strategies as st

from evtplus.decoder import EventRecord
from evtplus.wire import (
    EventX, EventY, MixedXLsb, MixedXMsb, Polarity, TsMsb, VecIntensityLsb, VecIntensityMsb,
    VecXLsb, VecXMsb,
)

u8 = st.integers(0, 0xFF)
u16 = st.integers(0, 0xFFFF)
u24 = st.integers(0, 0xFFFFFF)
pol = st.sampled_from([Polarity.ON, Polarity.OFF])

datums = st.one_of(
    st.builds(TsMsb, u24),
    st.builds(EventY, u16, u8),
    st.builds(MixedXMsb, pol, u16, u8),
    st.builds(MixedXLsb, u24),
    st.builds(EventX, pol, u16, u8),
    st.builds(VecXMsb, pol, u16, u8),
    st.builds(VecXLsb, u24),
    st.builds(VecIntensityMsb, u24),
    st.builds(VecIntensityLsb, u8),
)


@st.composite
def event_lists(draw, mixed=False, max_size=60, cols=96, rows=6, t_max=1 << 18):
    n = draw(st.integers(0, max_size))
    evs = []
    for _ in range(n):
        evs.append(EventRecord(
            draw(st.integers(0, cols - 1)),
            draw(st.integers(0, rows - 1)),
            draw(pol),
            draw(st.integers(0, t_max)),
            draw(st.integers(0, 0xFFFFFFFF)) if mixed else None,
        ))
    return sorted(evs, key=lambda e: (e.t_us, e.y, e.x, e.polarity))


# -- acceptance reporting: one PASS/FAIL line per criterion ----------------

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    n, title = mark.args
    ok, _ = _criteria.get(n, (True, title))
    _criteria[n] = (ok and rep.passed, title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        ok, title = _criteria[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}")
