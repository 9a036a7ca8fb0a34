"""Grid geometry, the parity target set, MIS checks and the 2-hop view window."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields
from itertools import product
from typing import TYPE_CHECKING, Iterator

if TYPE_CHECKING:
    from .model import Configuration

Coord = tuple[int, int]

#: exhaustion budget for the brute-force MIS oracle (node count)
BRUTE_FORCE_LIMIT = 20


@dataclass(frozen=True)
class GridDims:
    m: int
    n: int

    def __post_init__(self) -> None:
        if self.m < 2 or self.n < 2:
            raise ValueError(f"grid must be at least 2x2, got {self.m}x{self.n}")

    @property
    def nodes(self) -> int:
        return self.m * self.n

    @property
    def edges(self) -> int:
        return (self.m - 1) * self.n + self.m * (self.n - 1)

    @property
    def robot_count(self) -> int:
        """Standard swarm size, ceil(m*n/2)."""
        return math.ceil(self.m * self.n / 2)

    def contains(self, c: Coord) -> bool:
        return 1 <= c[0] <= self.m and 1 <= c[1] <= self.n

    def coords(self) -> Iterator[Coord]:
        """All nodes in row-major order."""
        return iter(product(range(1, self.m + 1), range(1, self.n + 1)))

    def neighbours(self, c: Coord) -> list[Coord]:
        i, j = c
        out = [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)]
        return [x for x in out if self.contains(x)]

    def check(self, c: Coord) -> None:
        if not self.contains(c):
            raise ValueError(f"coordinate {c} outside {self.m}x{self.n} grid")


def adjacent(a: Coord, b: Coord) -> bool:
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1


def reference_mis(dims: GridDims) -> set[Coord]:
    """Nodes (s, t) with s and t of equal parity."""
    return {(s, t) for s, t in dims.coords() if (s - t) % 2 == 0}


def row_quota(dims: GridDims, i: int) -> int:
    """Number of target nodes lying in row ``i``."""
    if not 1 <= i <= dims.m:
        raise ValueError(f"row {i} outside 1..{dims.m}")
    if dims.n % 2 == 0:
        return dims.n // 2
    return (dims.n + 1) // 2 if i % 2 == 1 else (dims.n - 1) // 2


def is_independent(dims: GridDims, nodes: set[Coord]) -> bool:
    for c in nodes:
        dims.check(c)
    return not any(adjacent(a, b) for a in nodes for b in nodes if a < b)


def is_maximum_independent(dims: GridDims, nodes: set[Coord]) -> bool:
    """Independent and of the closed-form maximum size ceil(m*n/2)."""
    return is_independent(dims, nodes) and len(nodes) == dims.robot_count


def brute_force_max_independent_size(dims: GridDims) -> int:
    """Exact maximum independent set size by exhaustive branch and bound.

    Kept deliberately naive (include/exclude recursion over row-major
    nodes) so it shares nothing with the closed form it is meant to check.
    """
    if dims.nodes > BRUTE_FORCE_LIMIT:
        raise ValueError(
            f"{dims.m}x{dims.n} has {dims.nodes} nodes, brute force limited to {BRUTE_FORCE_LIMIT}"
        )
    order = list(dims.coords())
    index = {c: k for k, c in enumerate(order)}
    nbr_mask = [0] * len(order)
    for c, k in index.items():
        for d in dims.neighbours(c):
            nbr_mask[k] |= 1 << index[d]

    best = 0

    def search(k: int, chosen: int, size: int) -> None:
        nonlocal best
        if size + (len(order) - k) <= best:
            return
        if k == len(order):
            best = size
            return
        if not nbr_mask[k] & chosen:
            search(k + 1, chosen | (1 << k), size + 1)
        search(k + 1, chosen, size)

    search(0, 0, 0)
    return best


class Color(str, enum.Enum):
    GREEN = "G"
    BLUE = "B"
    RED = "R"

    def __str__(self) -> str:
        return self.value


class Cell(enum.Enum):
    """What a robot perceives at one node of its window."""

    MISSING = "x"
    EMPTY = "."
    GREEN = "G"
    BLUE = "B"
    RED = "R"

    @property
    def exists(self) -> bool:
        return self is not Cell.MISSING

    @property
    def occupied(self) -> bool:
        return self in (Cell.GREEN, Cell.BLUE, Cell.RED)

    @property
    def color(self) -> Color | None:
        return Color(self.value) if self.occupied else None

    @classmethod
    def of(cls, color: Color) -> Cell:
        return cls(color.value)


_CELL_OF = {Color.GREEN: Cell.GREEN, Color.BLUE: Cell.BLUE, Color.RED: Cell.RED}

# (row offset, column offset) of each window cell; rows grow downwards
OFFSETS: dict[str, Coord] = {
    "self": (0, 0),
    "l1": (0, -1),
    "l2": (0, -2),
    "r1": (0, 1),
    "r2": (0, 2),
    "u1": (-1, 0),
    "u2": (-2, 0),
    "d1": (1, 0),
    "d2": (2, 0),
    "nw": (-1, -1),
    "ne": (-1, 1),
    "sw": (1, -1),
    "se": (1, 1),
}


@dataclass(frozen=True, slots=True)
class View:
    self: Cell
    l1: Cell
    l2: Cell
    r1: Cell
    r2: Cell
    u1: Cell
    u2: Cell
    d1: Cell
    d2: Cell
    nw: Cell
    ne: Cell
    sw: Cell
    se: Cell

    def validate(self) -> None:
        """Raise ValueError unless the view could come from a real grid."""
        if not self.self.occupied:
            raise ValueError("view centre must be occupied")
        missing = {f.name for f in fields(self) if not getattr(self, f.name).exists}
        # a window is a rectangle clipped by the four walls; each wall is
        # described by how far away it is (0 = one step, 1 = two steps)
        for near, far in (("l1", "l2"), ("r1", "r2"), ("u1", "u2"), ("d1", "d2")):
            if near in missing and far not in missing:
                raise ValueError(f"{far} exists but {near} does not")
        for diag, (vert, horiz) in {
            "nw": ("u1", "l1"),
            "ne": ("u1", "r1"),
            "sw": ("d1", "l1"),
            "se": ("d1", "r1"),
        }.items():
            expect = vert in missing or horiz in missing
            if (diag in missing) != expect:
                raise ValueError(f"{diag} existence inconsistent with {vert}/{horiz}")

    @classmethod
    def from_cells(cls, cells: dict[str, Cell]) -> View:
        """Build a view, defaulting unspecified cells to EMPTY."""
        return cls(**{name: cells.get(name, Cell.EMPTY) for name in OFFSETS})


# same order as the View fields; closed under negation, so "b is in a's
# window" is symmetric
WINDOW = tuple(OFFSETS.values())


def extract_view(
    config: Configuration, at: Coord, occupancy: dict[Coord, Color] | None = None
) -> View:
    """The 13-cell window around ``at``; ``occupancy`` may be passed to reuse a lookup."""
    if occupancy is None:
        occupancy = config.occupancy()
    if at not in occupancy:
        raise ValueError(f"no robot at {at}")
    m, n = config.dims.m, config.dims.n
    i, j = at
    cells = []
    for di, dj in WINDOW:
        c = (i + di, j + dj)
        if not (1 <= c[0] <= m and 1 <= c[1] <= n):
            cells.append(Cell.MISSING)
        else:
            color = occupancy.get(c)
            cells.append(Cell.EMPTY if color is None else _CELL_OF[color])
    return View(*cells)
