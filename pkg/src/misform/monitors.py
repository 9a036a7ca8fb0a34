"""Runtime checks of the protocol's safety claims.

All checks are read-only and return a (possibly empty) list of violations.
"""

from __future__ import annotations

import enum
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .grid import Color, Coord, adjacent, is_maximum_independent, reference_mis
from .model import Configuration, TraceEvent, is_final


class Kind(str, enum.Enum):
    COLLISION_TYPE1 = "CollisionType1"
    COLLISION_TYPE2 = "CollisionType2"
    RED_MOVED = "RedMoved"
    RED_RECOLORED = "RedRecolored"
    ILLEGAL_TRANSITION = "IllegalTransition"
    ILLEGAL_MOVE = "IllegalMove"
    RED_OFF_TARGET = "RedOffTarget"
    RED_ADJACENT = "RedAdjacent"
    ROW_ORDER = "RowOrder"
    DISTINCTNESS_BROKEN = "DistinctnessBroken"
    FINAL_NOT_MIS = "FinalNotMis"

    def __str__(self) -> str:
        return self.value


#: kinds that encode the reconstruction's own (stronger) invariants
RECONSTRUCTION_DERIVED = frozenset({Kind.RED_OFF_TARGET})

LEGAL_TRANSITIONS = {
    (Color.GREEN, Color.GREEN),
    (Color.BLUE, Color.BLUE),
    (Color.RED, Color.RED),
    (Color.GREEN, Color.BLUE),
    (Color.GREEN, Color.RED),
    (Color.BLUE, Color.GREEN),
}


@dataclass(frozen=True)
class Violation:
    kind: Kind
    round: int | None = None
    ids: tuple[int, ...] = ()
    coords: tuple[Coord, ...] = ()
    detail: str = ""
    digest: str | None = field(default=None, compare=False)

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "round": self.round,
            "ids": list(self.ids),
            "coords": [list(c) for c in self.coords],
            "detail": self.detail,
            "digest": self.digest,
            "reconstructionDerived": self.kind in RECONSTRUCTION_DERIVED,
        }


def collisions(pre: Configuration, event: TraceEvent) -> list[Violation]:
    """Type-1 (into a node occupied at look time) and Type-2 (shared target)."""
    out = []
    occupied = {r.pos: rid for rid, r in pre.robots.items()}
    movers = [mv for mv in event.moves if mv.dst != mv.src]
    for mv in movers:
        if mv.dst in occupied:
            out.append(
                Violation(
                    Kind.COLLISION_TYPE1,
                    event.round,
                    (mv.id, occupied[mv.dst]),
                    (mv.dst,),
                    f"robot {mv.id} moved onto {mv.dst} held by robot {occupied[mv.dst]}",
                )
            )
    targets = defaultdict(list)
    for mv in movers:
        if mv.dst not in occupied:
            targets[mv.dst].append(mv.id)
    for dst, ids in targets.items():
        if len(ids) > 1:
            out.append(
                Violation(
                    Kind.COLLISION_TYPE2,
                    event.round,
                    tuple(sorted(ids)),
                    (dst,),
                    f"robots {sorted(ids)} all moved to vacant {dst}",
                )
            )
    return out


def check_step(pre: Configuration, event: TraceEvent, post: Configuration) -> list[Violation]:
    if pre.dims != post.dims or set(pre.robots) != set(post.robots):
        raise ValueError("pre and post configurations describe different swarms")
    recorded = {mv.id for mv in event.moves}
    if not recorded <= set(pre.robots) or not recorded <= set(event.activated):
        raise ValueError("event records robots that were not activated")

    out = collisions(pre, event)
    rnd = event.round
    for rid, before in pre.robots.items():
        after = post.robots[rid]
        if before.color is Color.RED:
            if after.pos != before.pos:
                out.append(Violation(Kind.RED_MOVED, rnd, (rid,), (before.pos, after.pos)))
            if after.color is not Color.RED:
                out.append(
                    Violation(
                        Kind.RED_RECOLORED,
                        rnd,
                        (rid,),
                        (before.pos,),
                        f"red became {after.color.name.lower()}",
                    )
                )
        elif (before.color, after.color) not in LEGAL_TRANSITIONS:
            out.append(
                Violation(
                    Kind.ILLEGAL_TRANSITION,
                    rnd,
                    (rid,),
                    (before.pos,),
                    f"{before.color.name.lower()} -> {after.color.name.lower()}",
                )
            )
        if after.pos != before.pos and not adjacent(before.pos, after.pos):
            out.append(Violation(Kind.ILLEGAL_MOVE, rnd, (rid,), (before.pos, after.pos)))
        if rid not in recorded and after != before:
            out.append(
                Violation(Kind.ILLEGAL_MOVE, rnd, (rid,), (before.pos, after.pos), "inactive robot changed")
            )
    return out


def row_order(config: Configuration) -> list[Violation]:
    """Reds left of blues left of greens, row by row.

    Blues in the east column are exempt from the blue/green comparison: a
    blue sequence may bend down the east boundary, so such a blue belongs
    to a sequence of an upper row and legitimately sits right of greens.
    """
    east = config.dims.n
    rows: dict[int, dict[Color, list[int]]] = defaultdict(lambda: defaultdict(list))
    for r in config.robots.values():
        rows[r.pos[0]][r.color].append(r.pos[1])
    out = []
    for i, by_color in sorted(rows.items()):
        reds, blues, greens = by_color[Color.RED], by_color[Color.BLUE], by_color[Color.GREEN]
        row_blues = [j for j in blues if j != east]
        for left, right, lname, rname in (
            (reds, blues, "red", "blue"),
            (row_blues, greens, "blue", "green"),
            (reds, greens, "red", "green"),
        ):
            if left and right and max(left) > min(right):
                out.append(
                    Violation(
                        Kind.ROW_ORDER,
                        coords=((i, max(left)), (i, min(right))),
                        detail=f"row {i}: {lname} right of {rname}",
                    )
                )
    return out


def check_state(config: Configuration, *, row_order_check: bool = True) -> list[Violation]:
    out = []
    counts = Counter(r.pos for r in config.robots.values())
    for c, k in sorted(counts.items()):
        if k > 1:
            ids = tuple(sorted(rid for rid, r in config.robots.items() if r.pos == c))
            out.append(Violation(Kind.DISTINCTNESS_BROKEN, ids=ids, coords=(c,)))
    red_set = config.red_positions()
    reds = sorted(red_set)
    for a in reds:
        for b in ((a[0], a[1] + 1), (a[0] + 1, a[1])):
            if b in red_set:
                out.append(Violation(Kind.RED_ADJACENT, coords=(a, b)))
    for c in reds:
        if (c[0] - c[1]) % 2:
            out.append(Violation(Kind.RED_OFF_TARGET, coords=(c,), detail="red outside parity set"))
    if row_order_check:
        out.extend(row_order(config))
    return out


def check_final(config: Configuration, *, exact_target: bool = True) -> list[Violation]:
    """Final-state check; with ``exact_target`` reds must sit on the parity set."""
    if not is_final(config):
        raise ValueError("check_final called on a configuration that is not all red")
    reds = config.red_positions()
    ok = config.distinct and is_maximum_independent(config.dims, reds)
    if ok and exact_target:
        ok = reds == reference_mis(config.dims)
    if ok:
        return []
    return [Violation(Kind.FINAL_NOT_MIS, coords=tuple(sorted(reds)), detail="red set is not the target MIS")]
