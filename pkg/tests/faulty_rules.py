"""Deliberately broken rule tables loaded by the CLI tests via --rule."""

from __future__ import annotations

from misform.grid import Cell
from misform.rules import NOOP, Guard, decide


def never_settle_on_west_wall(view):
    g, a = decide(view)
    if g is Guard.G_RED and view.l1 is Cell.MISSING:
        return Guard.G_WAIT, NOOP
    return g, a
