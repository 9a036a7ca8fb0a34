"""Run-config files, JSON Lines traces, report JSON and frame rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

from .grid import Color, GridDims
from .model import Configuration, Robot, TraceEvent, canonical_digest
from .sim import FullSync, RandomFair, RoundRobin, SchedulerSpec, Scripted, SingletonSweep


class ConfigError(ValueError):
    """A run-config file or trace could not be decoded."""


_RUN_KEYS = {"rows", "cols", "robots", "scheduler", "maxRounds", "monitors", "trace", "frames"}
_ROBOT_KEYS = {"r", "c", "color"}
_SCHED_KEYS = {"type", "seed", "p", "k", "script", "order"}


@dataclass
class RunConfig:
    config: Configuration
    scheduler: SchedulerSpec = field(default_factory=FullSync)
    max_rounds: int | None = None
    monitors: bool = True
    trace: str | None = None
    frames: str | None = None


def _reject_unknown(d: dict, allowed: set[str], where: str) -> None:
    extra = set(d) - allowed
    if extra:
        raise ConfigError(f"unknown field(s) in {where}: {sorted(extra)}")


def scheduler_from_json(d: dict) -> SchedulerSpec:
    if not isinstance(d, dict):
        raise ConfigError("scheduler must be an object")
    _reject_unknown(d, _SCHED_KEYS, "scheduler")
    kind = str(d.get("type", "fullsync")).lower()
    try:
        return make_scheduler(
            kind, seed=d.get("seed", 0), p=d.get("p", 0.5), k=d.get("k", 1),
            script=d.get("script"), order=d.get("order"),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def make_scheduler(kind: str, *, seed: int = 0, p: float = 0.5, k: int = 1, script=None, order=None) -> SchedulerSpec:
    kind = kind.lower().replace("_", "-")
    if kind == "fullsync":
        return FullSync()
    if kind in ("random", "random-fair", "randomfair"):
        return RandomFair(float(p), int(seed))
    if kind in ("round-robin", "roundrobin"):
        return RoundRobin(int(k))
    if kind in ("singleton", "singleton-sweep", "sweep"):
        return SingletonSweep(tuple(int(i) for i in order) if order else None)
    if kind == "scripted":
        if not script:
            raise ValueError("scripted scheduler needs a nonempty script")
        return Scripted(tuple(frozenset(int(i) for i in s) for s in script))
    raise ValueError(f"unknown scheduler {kind!r}")


def config_from_json(d: dict) -> Configuration:
    try:
        dims = GridDims(int(d["rows"]), int(d["cols"]))
        robots = {}
        for k, rd in enumerate(d["robots"]):
            _reject_unknown(rd, _ROBOT_KEYS | {"id"}, "robot")
            robots[int(rd.get("id", k))] = Robot((int(rd["r"]), int(rd["c"])), Color(rd.get("color", "G")))
        return Configuration(dims, robots)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad configuration: {exc}") from exc


def config_to_json(config: Configuration) -> dict:
    return {
        "rows": config.dims.m,
        "cols": config.dims.n,
        "robots": [
            {"id": rid, "r": r.pos[0], "c": r.pos[1], "color": r.color.value}
            for rid, r in sorted(config.robots.items())
        ],
    }


def load_run_config(path: str | Path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("run config must be a JSON object")
    _reject_unknown(raw, _RUN_KEYS, "run config")
    config = config_from_json(raw)
    out = RunConfig(config)
    if "scheduler" in raw:
        out.scheduler = scheduler_from_json(raw["scheduler"])
    if "maxRounds" in raw:
        out.max_rounds = int(raw["maxRounds"])
    if "monitors" in raw:
        out.monitors = bool(raw["monitors"])
    out.trace = raw.get("trace")
    out.frames = raw.get("frames")
    return out


# -- traces ---------------------------------------------------------------
#
# Line 1 is a round-0 header carrying the initial configuration under
# "initial"; every later line is one TraceEvent.


def header_event(initial: Configuration) -> dict:
    return {
        "round": 0,
        "activated": [],
        "moves": [],
        "digest": canonical_digest(initial),
        "initial": config_to_json(initial),
    }


class TraceWriter:
    def __init__(self, fh: IO[str]):
        self.fh = fh

    def write(self, obj: dict) -> None:
        self.fh.write(json.dumps(obj, separators=(",", ":"), ensure_ascii=False) + "\n")

    def header(self, initial: Configuration) -> None:
        self.write(header_event(initial))

    def event(self, ev: TraceEvent) -> None:
        self.write(ev.to_json())


def read_trace(path: str | Path) -> tuple[Configuration, list[TraceEvent]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ConfigError(f"{path} is empty")
    try:
        head = json.loads(lines[0])
        initial = config_from_json(head["initial"])
        events = [TraceEvent.from_json(json.loads(line)) for line in lines[1:] if line.strip()]
    except (KeyError, json.JSONDecodeError) as exc:
        raise ConfigError(f"bad trace {path}: {exc}") from exc
    return initial, events


def final_from_trace(initial: Configuration, events: Iterable[TraceEvent]) -> Configuration:
    """Apply the recorded per-robot outcomes in order."""
    robots = dict(initial.robots)
    for ev in events:
        for mv in ev.moves:
            robots[mv.id] = Robot(mv.dst, mv.color)
    return Configuration(initial.dims, robots)


# -- rendering ------------------------------------------------------------


def render_ascii(config: Configuration) -> str:
    occ = config.occupancy()
    return "\n".join(
        "".join(occ[(i, j)].value if (i, j) in occ else "." for j in range(1, config.dims.n + 1))
        for i in range(1, config.dims.m + 1)
    )


_FILL = {Color.GREEN: "#2e9e44", Color.BLUE: "#2f5fd0", Color.RED: "#d03030"}


def render_svg(frames: list[tuple[int, Configuration]], cell: int = 18) -> str:
    """All frames side by side in one SVG, each labelled with its round."""
    if not frames:
        return '<svg xmlns="http://www.w3.org/2000/svg"/>'
    dims = frames[0][1].dims
    w, h = dims.n * cell, dims.m * cell
    gap, label = cell, 14
    parts = []
    for k, (rnd, config) in enumerate(frames):
        x0 = k * (w + gap)
        parts.append(f'<text x="{x0}" y="11" font-size="11" font-family="monospace">round {rnd}</text>')
        parts.append(
            f'<rect x="{x0}" y="{label}" width="{w}" height="{h}" fill="white" stroke="#888"/>'
        )
        for r in config.robots.values():
            cx = x0 + (r.pos[1] - 0.5) * cell
            cy = label + (r.pos[0] - 0.5) * cell
            parts.append(f'<circle cx="{cx}" cy="{cy}" r="{cell * 0.38}" fill="{_FILL[r.color]}"/>')
    width = len(frames) * (w + gap) - gap
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{h + label}">'
        + "".join(parts)
        + "</svg>\n"
    )


class FrameSink:
    """Collects one frame per round (plus the initial one) for text or SVG output."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.frames: list[tuple[int, Configuration]] = []

    def add(self, rnd: int, config: Configuration) -> None:
        self.frames.append((rnd, config))

    def close(self) -> None:
        if self.path.suffix.lower() == ".svg":
            self.path.write_text(render_svg(self.frames), encoding="utf-8")
            return
        blocks = [f"# round {rnd}\n{render_ascii(c)}\n" for rnd, c in self.frames]
        self.path.write_text("\n".join(blocks), encoding="utf-8")


def iter_frames(path: str | Path) -> Iterator[tuple[int, str]]:
    """Parse a text frame file back into (round, ascii) pairs."""
    for block in Path(path).read_text(encoding="utf-8").strip().split("\n\n"):
        head, _, body = block.partition("\n")
        yield int(head.split()[-1]), body.strip("\n")
