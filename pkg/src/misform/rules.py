"""Compute phase: map a robot's 2-hop view to a guard and an action.

Guards are tried in a fixed priority order and the first that holds wins.
Each green or blue guard below is a boolean formula over the thirteen
window cells; ``missing`` means the node lies outside the grid.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

from .grid import Cell, Color, Coord, View

M, E, G, B, R = Cell.MISSING, Cell.EMPTY, Cell.GREEN, Cell.BLUE, Cell.RED


class Direction(enum.Enum):
    LEFT = (0, -1)
    RIGHT = (0, 1)
    UP = (-1, 0)
    DOWN = (1, 0)

    def apply(self, c: Coord) -> Coord:
        return (c[0] + self.value[0], c[1] + self.value[1])


@dataclass(frozen=True)
class Action:
    """Recolour and/or move; both fields None is a no-op."""

    color: Color | None = None
    move: Direction | None = None

    @property
    def is_noop(self) -> bool:
        return self.color is None and self.move is None

    def __str__(self) -> str:
        if self.is_noop:
            return "noop"
        parts = []
        if self.color is not None:
            parts.append(f"color:{self.color.value}")
        if self.move is not None:
            parts.append(f"move:{self.move.name.lower()}")
        return "+".join(parts)


NOOP = Action()


def move(d: Direction) -> Action:
    return Action(move=d)


def recolor(c: Color, d: Direction | None = None) -> Action:
    return Action(color=c, move=d)


class Guard(str, enum.Enum):
    G_RED = "G-RED"
    G_LEFT = "G-LEFT"
    G_UP = "G-UP"
    G_RIGHT_A = "G-RIGHT-A"
    G_DOWN_A = "G-DOWN-A"
    G_BLUE_A = "G-BLUE-A"
    G_RIGHT_B = "G-RIGHT-B"
    G_DOWN_B = "G-DOWN-B"
    G_UP_B = "G-UP-B"
    G_BLUE_B = "G-BLUE-B"
    G_DOWN_U = "G-DOWN-U"
    G_BLUE_U = "G-BLUE-U"
    G_WAIT = "G-WAIT"
    B_RIGHT = "B-RIGHT"
    B_LEFT = "B-LEFT"
    B_DOWN = "B-DOWN"
    B_REVERT = "B-REVERT"
    B_WAIT = "B-WAIT"
    R_FIXED = "R-FIXED"

    def __str__(self) -> str:
        return self.value


FAMILY: dict[Guard, str] = {
    Guard.G_LEFT: "G1",
    Guard.G_DOWN_A: "G2",
    Guard.G_DOWN_B: "G2",
    Guard.G_DOWN_U: "G2",
    Guard.G_RIGHT_A: "G3",
    Guard.G_RIGHT_B: "G3",
    Guard.G_UP: "G4",
    Guard.G_UP_B: "G4",
    Guard.G_BLUE_A: "G5",
    Guard.G_BLUE_B: "G5",
    Guard.G_BLUE_U: "G5",
    Guard.G_RED: "G6",
    Guard.B_RIGHT: "B1",
    Guard.B_LEFT: "B2",
    Guard.B_DOWN: "B3",
    Guard.B_REVERT: "B4",
    Guard.G_WAIT: "none",
    Guard.B_WAIT: "none",
    Guard.R_FIXED: "none",
}


def guard_family(g: Guard) -> str:
    """Algorithm family label (G1..G6, B1..B4) or ``"none"`` for waits."""
    return FAMILY[Guard(g)]


Decision = tuple[Guard, Action]


def _empty_or_missing(c: Cell) -> bool:
    return c is E or c is M


def _clear_up(v: View) -> bool:
    # shared by both upward guards: two-hop gap above, nothing can slide
    # into u1 from the right, and nw is either quiet or a settled robot
    return (
        v.u1 is E
        and _empty_or_missing(v.u2)
        and _empty_or_missing(v.ne)
        and v.nw in (M, E, R)
        and not (v.u2 is M and v.nw is R)
    )


def _right_ok(v: View) -> bool:
    # entering the east column needs ne clear of anything that could drop down
    return v.r1 is E and (v.r2 is not M or v.ne in (M, E, R))


def _blocked_fwd(v: View) -> bool:
    return (v.r1 is not M and v.r1.occupied) or (v.r1 is M and (v.d1 is M or v.d1.occupied))


def _left_open(v: View) -> bool:
    return v.l1 is E and _empty_or_missing(v.l2)


def decide_green(v: View) -> Decision:
    l1, l2, u1, u2, nw = v.l1, v.l2, v.u1, v.u2, v.nw

    if (
        _empty_or_missing(l1)
        and _empty_or_missing(u1)
        and l2 in (M, R)
        and u2 in (M, R)
        and nw in (M, R)
        and not (l1 is not M and l2 is M and nw is M)
        and not (u1 is not M and u2 is M and nw is M)
    ):
        return Guard.G_RED, recolor(Color.RED)

    if _left_open(v) and not (l2 is M and nw is R):
        return Guard.G_LEFT, move(Direction.LEFT)

    # nothing further left for this robot: wall, a red, a red two hops
    # away, or the column-1 dead end under a red
    left_ctx = l1 is M or l1 is R or (l1 is E and (l2 is R or (l2 is M and nw is R)))
    if _clear_up(v) and left_ctx:
        return Guard.G_UP, move(Direction.UP)

    # step beside a red only to climb into the vacant node above-left
    if l1 is E and l2 is R and nw is E and u1 is not B:
        return Guard.G_LEFT, move(Direction.LEFT)

    anchored = (u1 is M and l1 is R) or (l1 is M and u1 is R) or (l1 is R and u1 is R)
    if anchored:
        if _right_ok(v):
            return Guard.G_RIGHT_A, move(Direction.RIGHT)
        if v.r1 is M and v.d1 is E:
            return Guard.G_DOWN_A, move(Direction.DOWN)
        if (v.r1 is not M and v.r1.occupied) or (v.r1 is M and v.d1.occupied):
            return Guard.G_BLUE_A, recolor(Color.BLUE)

    if l1 is B:
        if _right_ok(v):
            return Guard.G_RIGHT_B, move(Direction.RIGHT)
        if v.r1 is M and v.d1 is E:
            return Guard.G_DOWN_B, move(Direction.DOWN)
        if _blocked_fwd(v):
            if _clear_up(v):
                return Guard.G_UP_B, move(Direction.UP)
            # u1 open but unusable: two-hop gap to a red above, or a
            # north-row dead end beside a settled red
            up_settled = u1 is E and (u2 is R or (u2 is M and v.nw is R))
            if (u1 is M or u1 is R or up_settled) and not (v.r1 is M and v.d1 is M):
                return Guard.G_BLUE_B, recolor(Color.BLUE)

    # a possible left move was already taken above
    if v.r1 is M and u1 is B:
        if v.d1 is E:
            return Guard.G_DOWN_U, move(Direction.DOWN)
        if v.d1 is G:
            return Guard.G_BLUE_U, recolor(Color.BLUE)

    return Guard.G_WAIT, NOOP


def decide_blue(v: View) -> Decision:
    if _right_ok(v):
        return Guard.B_RIGHT, recolor(Color.GREEN, Direction.RIGHT)
    if v.r1 is M:
        if _left_open(v):
            return Guard.B_LEFT, recolor(Color.GREEN, Direction.LEFT)
        if (v.l1.occupied or v.l2.occupied) and v.d1 is E:
            return Guard.B_DOWN, recolor(Color.GREEN, Direction.DOWN)
        if (v.u1 is E and v.l1 is not B) or (v.u1 is R and v.l1 is E) or v.u1 is G:
            return Guard.B_REVERT, recolor(Color.GREEN)
    return Guard.B_WAIT, NOOP


def decide(view: View) -> Decision:
    """First-match evaluation of the guard table for the robot at the centre."""
    me = view.self
    if me is R:
        return Guard.R_FIXED, NOOP
    if me is G:
        return decide_green(view)
    if me is B:
        return decide_blue(view)
    raise ValueError(f"view centre must hold a robot, got {me}")


def checked_decide(view: View) -> Decision:
    """``decide`` with the view's well-formedness verified first."""
    view.validate()
    return decide(view)


Rule = Callable[[View], Decision]
