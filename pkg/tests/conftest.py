from __future__ import annotations

from hypothesis import strategies as st

from misform.grid import Color, GridDims
from misform.model import Configuration
from misform.placements import random_placement
from misform.sim import RandomFair, run

# acceptance lines, printed once at the end of the session
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])


@st.composite
def dims(draw, lo: int = 2, hi: int = 6) -> GridDims:
    return GridDims(draw(st.integers(lo, hi)), draw(st.integers(lo, hi)))


@st.composite
def reachable_configs(draw, lo: int = 2, hi: int = 6, max_prefix: int = 40) -> Configuration:
    """A random placement advanced by a random-length RandomFair prefix."""
    d = draw(dims(lo, hi))
    start = random_placement(d, draw(st.integers(0, 2**31)))
    prefix = draw(st.integers(0, max_prefix))
    p = draw(st.sampled_from([0.2, 0.5, 0.9]))
    return run(start, RandomFair(p, draw(st.integers(0, 1000))), prefix, monitor=False).final


@st.composite
def arbitrary_configs(draw, lo: int = 2, hi: int = 5) -> Configuration:
    """Any set of distinct occupied cells with any colours (not necessarily reachable)."""
    d = draw(dims(lo, hi))
    cells = draw(st.lists(st.sampled_from(list(d.coords())), min_size=1, max_size=d.nodes, unique=True))
    colors = draw(st.lists(st.sampled_from(list(Color)), min_size=len(cells), max_size=len(cells)))
    return Configuration.from_cells(d, [(i, j, c) for (i, j), c in zip(cells, colors)])
