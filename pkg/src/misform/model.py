"""Global state and trace records shared by the engine, monitors and explorer."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple

from .grid import Color, Coord, GridDims

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> str:
    h = FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"


class Robot(NamedTuple):
    pos: Coord
    color: Color


@dataclass(frozen=True)
class Configuration:
    """Grid dimensions plus robot id -> (position, colour).

    Positions are range-checked but not required to be distinct, so that
    a faulty rule table can still produce an observable (broken) state.
    """

    dims: GridDims
    robots: Mapping[int, Robot]

    def __post_init__(self) -> None:
        robots = {int(k): Robot(tuple(v[0]), Color(v[1])) for k, v in self.robots.items()}
        for rid, r in robots.items():
            if not self.dims.contains(r.pos):
                raise ValueError(f"robot {rid} at {r.pos} is off the grid")
        object.__setattr__(self, "robots", MappingProxyType(robots))

    @classmethod
    def _trusted(cls, dims: GridDims, robots: dict[int, Robot]) -> Configuration:
        # internal fast path: robots already normalised and in range
        obj = object.__new__(cls)
        object.__setattr__(obj, "dims", dims)
        object.__setattr__(obj, "robots", MappingProxyType(robots))
        return obj

    @classmethod
    def from_cells(
        cls, dims: GridDims, cells: Iterable[tuple[int, int, Color | str]]
    ) -> Configuration:
        """Number robots 0.. in row-major order of the given cells."""
        ordered = sorted((i, j, Color(c)) for i, j, c in cells)
        return cls(dims, {k: Robot((i, j), c) for k, (i, j, c) in enumerate(ordered)})

    @classmethod
    def greens(cls, dims: GridDims, coords: Iterable[Coord]) -> Configuration:
        return cls.from_cells(dims, [(i, j, Color.GREEN) for i, j in coords])

    def occupancy(self) -> dict[Coord, Color]:
        return {r.pos: r.color for r in self.robots.values()}

    def positions(self) -> set[Coord]:
        return {r.pos for r in self.robots.values()}

    def red_positions(self) -> set[Coord]:
        return {r.pos for r in self.robots.values() if r.color is Color.RED}

    @property
    def distinct(self) -> bool:
        return len(self.positions()) == len(self.robots)

    @property
    def is_standard(self) -> bool:
        return len(self.robots) == self.dims.robot_count and self.distinct

    def cells(self) -> tuple[tuple[int, int, str], ...]:
        """Id-free canonical form: occupied cells sorted row-major."""
        return tuple(sorted((r.pos[0], r.pos[1], r.color.value) for r in self.robots.values()))

    def canonical(self) -> str:
        body = ";".join(f"{i},{j},{c}" for i, j, c in self.cells())
        return f"{self.dims.m},{self.dims.n}|{body}"

    def digest(self) -> str:
        return canonical_digest(self)

    def relabel(self, mapping: Mapping[int, int]) -> Configuration:
        return Configuration(self.dims, {mapping[k]: v for k, v in self.robots.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.dims == other.dims and dict(self.robots) == dict(other.robots)

    def __hash__(self) -> int:
        return hash((self.dims, frozenset(self.robots.items())))


def canonical_digest(config: Configuration) -> str:
    """64-bit FNV-1a of the canonical encoding, as 16 lowercase hex chars."""
    return fnv1a64(config.canonical().encode("utf-8"))


def is_final(config: Configuration) -> bool:
    return all(r.color is Color.RED for r in config.robots.values())


@dataclass(frozen=True)
class MoveRecord:
    id: int
    guard: str
    family: str
    action: str
    src: Coord
    dst: Coord
    color: Color

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "guard": self.guard,
            "family": self.family,
            "action": self.action,
            "from": list(self.src),
            "to": list(self.dst),
            "color": self.color.value,
        }

    @classmethod
    def from_json(cls, d: dict) -> MoveRecord:
        return cls(
            id=int(d["id"]),
            guard=d["guard"],
            family=d["family"],
            action=d.get("action", ""),
            src=tuple(d["from"]),
            dst=tuple(d["to"]),
            color=Color(d["color"]),
        )


@dataclass(frozen=True)
class TraceEvent:
    round: int
    activated: tuple[int, ...]
    moves: tuple[MoveRecord, ...]
    digest: str
    violations: tuple = field(default=(), compare=False)

    def to_json(self) -> dict:
        d = {
            "round": self.round,
            "activated": list(self.activated),
            "moves": [mv.to_json() for mv in self.moves],
            "digest": self.digest,
        }
        if self.violations:
            d["violations"] = [v.to_json() for v in self.violations]
        return d

    @classmethod
    def from_json(cls, d: dict) -> TraceEvent:
        return cls(
            round=int(d["round"]),
            activated=tuple(d["activated"]),
            moves=tuple(MoveRecord.from_json(mv) for mv in d["moves"]),
            digest=d["digest"],
        )
