from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from misform.grid import OFFSETS, Cell, Color, GridDims, View, extract_view
from misform.model import Configuration
from misform.rules import (
    FAMILY,
    NOOP,
    Action,
    Direction,
    Guard,
    checked_decide,
    decide,
    guard_family,
    move,
    recolor,
)

M, E, G, B, R = Cell.MISSING, Cell.EMPTY, Cell.GREEN, Cell.BLUE, Cell.RED


def view_at(m, n, at, cells):
    return extract_view(Configuration.from_cells(GridDims(m, n), cells), at)


@st.composite
def views(draw):
    """Realisable views: a grid, a centre robot, arbitrary window contents."""
    m, n = draw(st.integers(2, 6)), draw(st.integers(2, 6))
    at = (draw(st.integers(1, m)), draw(st.integers(1, n)))
    cells = [(at[0], at[1], draw(st.sampled_from("GBR")))]
    for name, (di, dj) in OFFSETS.items():
        c = (at[0] + di, at[1] + dj)
        if name == "self" or not (1 <= c[0] <= m and 1 <= c[1] <= n):
            continue
        k = draw(st.sampled_from(".GBR"))
        if k != ".":
            cells.append((c[0], c[1], k))
    return view_at(m, n, at, cells)


# -- worked examples ------------------------------------------------------


def test_corner_green_turns_red():
    v = view_at(2, 2, (1, 1), [(1, 1, "G")])
    assert decide(v) == (Guard.G_RED, recolor(Color.RED))


def test_green_at_1_2_moves_left():
    v = view_at(3, 3, (1, 2), [(1, 2, "G")])
    assert (v.l1, v.l2, v.nw) == (E, M, M)
    assert decide(v) == (Guard.G_LEFT, move(Direction.LEFT))


def test_anchored_green_blocked_right_turns_blue():
    v = view_at(3, 4, (2, 2), [(2, 2, "G"), (2, 1, "R"), (1, 2, "R"), (2, 3, "G")])
    assert (v.l1, v.u1, v.r1) == (R, R, G) and v.r2 is not M
    assert decide(v) == (Guard.G_BLUE_A, recolor(Color.BLUE))


def test_green_below_corner_red_settles():
    v = view_at(2, 2, (2, 2), [(2, 2, "G"), (1, 1, "R")])
    assert (v.l1, v.l2, v.u1, v.u2, v.nw) == (E, M, E, M, R)
    assert decide(v) == (Guard.G_RED, recolor(Color.RED))


def test_blue_with_room_turns_green_and_moves_right():
    v = view_at(2, 4, (1, 2), [(1, 2, "B"), (1, 1, "R")])
    assert v.r1 is E and v.r2 is not M
    assert decide(v) == (Guard.B_RIGHT, Action(Color.GREEN, Direction.RIGHT))


def test_red_is_fixed():
    v = view_at(3, 3, (2, 2), [(2, 2, "R")])
    assert decide(v) == (Guard.R_FIXED, NOOP)


def test_look_time_occupancy_blocks_up():
    # golden 2x2 round 1: (2,1) sees ne=(1,2) occupied and waits
    v = view_at(2, 2, (2, 1), [(1, 2, "G"), (2, 1, "G")])
    assert decide(v) == (Guard.G_WAIT, NOOP)


def test_trailing_robot_waits_behind_neighbour():
    v = view_at(2, 3, (1, 3), [(1, 2, "G"), (1, 3, "G")])
    assert decide(v)[1] == NOOP


def test_family_labels():
    assert guard_family(Guard.G_RED) == "G6"
    assert guard_family(Guard.B_LEFT) == "B2"
    assert guard_family(Guard.G_WAIT) == "none"
    assert guard_family("G-LEFT") == "G1"
    assert set(FAMILY) == set(Guard)
    for g in Guard:
        fam = FAMILY[g]
        if fam != "none":
            assert fam[0] == g.value[0]


def test_action_strings():
    assert str(NOOP) == "noop"
    assert str(recolor(Color.RED)) == "color:R"
    assert str(move(Direction.LEFT)) == "move:left"
    assert str(Action(Color.GREEN, Direction.RIGHT)) == "color:G+move:right"


def test_checked_decide_rejects_malformed():
    with pytest.raises(ValueError):
        checked_decide(View.from_cells({"self": G, "l1": M, "l2": G}))
    with pytest.raises(ValueError):
        decide(View.from_cells({"self": E}))


# -- table invariants over realisable views -------------------------------

LEGAL = {(G, None), (B, None), (R, None), (G, Color.BLUE), (G, Color.RED), (B, Color.GREEN)}


@settings(max_examples=1500, deadline=None)
@given(views())
def test_table_invariants(v):
    guard, action = decide(v)
    assert decide(v) == (guard, action)
    assert guard.value[0] == v.self.value if v.self is not R else guard is Guard.R_FIXED
    assert (v.self, action.color) in LEGAL
    if v.self is R:
        assert action == NOOP
    if action.is_noop:
        assert FAMILY[guard] == "none"
    d = action.move
    if d is None:
        return
    target = {Direction.LEFT: v.l1, Direction.RIGHT: v.r1, Direction.UP: v.u1, Direction.DOWN: v.d1}[d]
    assert target is E
    if d is Direction.DOWN:
        assert v.r1 is M
    if d is Direction.LEFT:
        # the red-flank step is the only left move with l2 occupied
        assert v.l2 in (M, E) or (v.l2 is R and v.nw is E and guard is Guard.G_LEFT)
    if d is Direction.UP:
        assert v.u2 in (M, E) and v.ne in (M, E) and v.nw in (M, E, R)
    if d is Direction.RIGHT and v.r2 is M:
        assert v.ne in (M, E, R)


@settings(max_examples=500, deadline=None)
@given(views())
def test_red_only_where_wall_or_red_guards_the_north_west(v):
    guard, _ = decide(v)
    if guard is Guard.G_RED:
        assert v.l1 in (M, E) and v.u1 in (M, E)
        assert v.l2 in (M, R) and v.u2 in (M, R) and v.nw in (M, R)
