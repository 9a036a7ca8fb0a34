"""Semi-synchronous round execution.

A round: the scheduler picks a nonempty activation set, every activated
robot looks at the pre-round configuration, and all resulting actions are
applied at once. Collisions are detected and reported, never resolved.
"""

from __future__ import annotations

import enum
import logging
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from . import monitors
from .grid import WINDOW, Color, GridDims, extract_view
from .model import Configuration, MoveRecord, Robot, TraceEvent, canonical_digest, is_final
from .rules import Action, Guard, Rule, decide, guard_family

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FullSync:
    pass


@dataclass(frozen=True)
class RandomFair:
    p: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0 < self.p <= 1:
            raise ValueError(f"activation probability must be in (0, 1], got {self.p}")


@dataclass(frozen=True)
class RoundRobin:
    k: int = 1

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("round-robin block size must be >= 1")


@dataclass(frozen=True)
class SingletonSweep:
    order: tuple[int, ...] | None = None


@dataclass(frozen=True)
class Scripted:
    script: tuple[frozenset[int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "script", tuple(frozenset(s) for s in self.script))
        if any(not s for s in self.script):
            raise ValueError("scripted activation sets must be nonempty")


SchedulerSpec = Union[FullSync, RandomFair, RoundRobin, SingletonSweep, Scripted]


def next_activation(spec: SchedulerSpec, round: int, config: Configuration) -> frozenset[int]:
    """Activation set for 1-based ``round``; deterministic in its inputs."""
    ids = sorted(config.robots)
    if not ids:
        raise ValueError("configuration has no robots")
    if isinstance(spec, FullSync):
        return frozenset(ids)
    if isinstance(spec, RandomFair):
        rng = random.Random(f"{spec.seed}:{round}")
        while True:
            chosen = frozenset(i for i in ids if rng.random() < spec.p)
            if chosen:
                return chosen
    if isinstance(spec, RoundRobin):
        start = (round - 1) * spec.k
        return frozenset(ids[(start + t) % len(ids)] for t in range(min(spec.k, len(ids))))
    if isinstance(spec, SingletonSweep):
        order = [i for i in (spec.order or ids) if i in config.robots] or ids
        return frozenset({order[(round - 1) % len(order)]})
    if isinstance(spec, Scripted):
        if round <= len(spec.script):
            return spec.script[round - 1]
        return frozenset(ids)
    raise TypeError(f"unknown scheduler {spec!r}")


class CollisionError(RuntimeError):
    """Raised by :func:`step` when two robots end up contending for a node."""

    def __init__(self, pre: Configuration, event: TraceEvent, post: Configuration, violations):
        self.pre, self.event, self.post = pre, event, post
        self.violations = list(violations)
        super().__init__("; ".join(f"{v.kind}: {v.detail}" for v in self.violations))


def plan(
    config: Configuration, ids: Iterable[int] | None = None, rule: Rule = decide
) -> dict[int, tuple[Guard, Action]]:
    """Look + compute for ``ids`` (default: every robot) on the same snapshot."""
    ids = config.robots if ids is None else ids
    occ = config.occupancy()
    return {rid: rule(extract_view(config, config.robots[rid].pos, occ)) for rid in ids}


def apply_plan(
    config: Configuration, decisions: dict[int, tuple[Guard, Action]], round: int = 1
) -> tuple[Configuration, TraceEvent]:
    robots = dict(config.robots)
    records = []
    for rid in sorted(decisions):
        guard, action = decisions[rid]
        src, color = robots[rid]
        dst = action.move.apply(src) if action.move else src
        if action.color is not None:
            color = action.color
        if not config.dims.contains(dst):
            raise ValueError(f"robot {rid} would leave the grid at {dst}")
        robots[rid] = Robot(dst, color)
        records.append(MoveRecord(rid, guard.value, guard_family(guard), str(action), src, dst, color))
    post = Configuration._trusted(config.dims, robots)
    event = TraceEvent(round, tuple(sorted(decisions)), tuple(records), canonical_digest(post))
    return post, event


def step(
    config: Configuration, act: Iterable[int], *, rule: Rule = decide, round: int = 1
) -> tuple[Configuration, TraceEvent]:
    act = frozenset(act)
    if not act:
        raise ValueError("activation set must be nonempty")
    unknown = act - set(config.robots)
    if unknown:
        raise ValueError(f"unknown robot ids {sorted(unknown)}")
    return _execute(config, plan(config, act, rule), round)


def _execute(config: Configuration, decisions, round: int) -> tuple[Configuration, TraceEvent]:
    for rid, (_, action) in decisions.items():
        dst = action.move.apply(config.robots[rid].pos) if action.move else None
        if dst is not None and not config.dims.contains(dst):
            raise CollisionError(
                config,
                TraceEvent(round, tuple(sorted(decisions)), (), ""),
                config,
                [monitors.Violation(monitors.Kind.ILLEGAL_MOVE, round, (rid,), (dst,), "move off the grid")],
            )
    post, event = apply_plan(config, decisions, round)
    clashes = monitors.collisions(config, event)
    if clashes:
        raise CollisionError(config, event, post, clashes)
    return post, event


class OutcomeKind(str, enum.Enum):
    COMPLETED = "Completed"
    ROUND_CAP_EXCEEDED = "RoundCapExceeded"
    INVARIANT_VIOLATION = "InvariantViolation"
    QUIESCENT_NON_FINAL = "QuiescentNonFinal"


@dataclass(frozen=True)
class Outcome:
    kind: OutcomeKind
    rounds: int
    violations: tuple = ()

    def __str__(self) -> str:
        if self.kind is OutcomeKind.COMPLETED:
            return f"Completed in {self.rounds} rounds"
        if self.kind is OutcomeKind.ROUND_CAP_EXCEEDED:
            return f"Round cap exceeded ({self.rounds})"
        if self.kind is OutcomeKind.QUIESCENT_NON_FINAL:
            return f"Quiescent but not final at round {self.rounds}"
        return f"Invariant violation at round {self.rounds}: " + "; ".join(
            str(v.kind) for v in self.violations
        )


def default_cap(dims: GridDims) -> int:
    return 50 * dims.m * dims.n * (dims.m + dims.n)


@dataclass
class RunResult:
    trace: list[TraceEvent]
    outcome: Outcome
    final: Configuration
    initial: Configuration
    warnings: list = field(default_factory=list)

    @property
    def moves(self) -> int:
        return sum(1 for ev in self.trace for mv in ev.moves if mv.src != mv.dst)

    @property
    def color_changes(self) -> int:
        return sum(1 for ev in self.trace for mv in ev.moves if "color:" in mv.action)


def run(
    config: Configuration,
    spec: SchedulerSpec = FullSync(),
    cap: int | None = None,
    *,
    monitor: bool = True,
    rule: Rule = decide,
    allow_nonstandard: bool = False,
    on_event=None,
) -> RunResult:
    """Run rounds until all robots are red, the cap, a violation, or a deadlock."""
    if not allow_nonstandard and not config.is_standard:
        raise ValueError(
            f"expected {config.dims.robot_count} robots on distinct nodes, got {len(config.robots)}"
        )
    cap = default_cap(config.dims) if cap is None else cap
    trace: list[TraceEvent] = []
    current = config

    def finish(kind: OutcomeKind, rounds: int, violations=()) -> RunResult:
        return RunResult(trace, Outcome(kind, rounds, tuple(violations)), current, config)

    rnd = 0
    probe = plan(current, rule=rule)
    while True:
        if is_final(current):
            if monitor:
                bad = monitors.check_final(current)
                if bad:
                    return finish(OutcomeKind.INVARIANT_VIOLATION, rnd, bad)
            return finish(OutcomeKind.COMPLETED, rnd)
        # full-activation probe so a schedule cannot fake a deadlock
        if all(a.is_noop for _, a in probe.values()):
            return finish(OutcomeKind.QUIESCENT_NON_FINAL, rnd)
        if rnd >= cap:
            return finish(OutcomeKind.ROUND_CAP_EXCEEDED, cap)
        rnd += 1
        act = next_activation(spec, rnd, current)
        try:
            post, event = _execute(current, {rid: probe[rid] for rid in act}, rnd)
        except CollisionError as exc:
            ev = exc.event
            ev = TraceEvent(ev.round, ev.activated, ev.moves, ev.digest, tuple(exc.violations))
            trace.append(ev)
            if on_event:
                on_event(ev, exc.post)
            return finish(OutcomeKind.INVARIANT_VIOLATION, rnd, exc.violations)
        if monitor:
            bad = monitors.check_step(current, event, post) + monitors.check_state(post)
            if bad:
                bad = [
                    monitors.Violation(v.kind, rnd, v.ids, v.coords, v.detail, event.digest) for v in bad
                ]
                event = TraceEvent(event.round, event.activated, event.moves, event.digest, tuple(bad))
                trace.append(event)
                current = post
                if on_event:
                    on_event(event, post)
                return finish(OutcomeKind.INVARIANT_VIOLATION, rnd, bad)
        trace.append(event)
        probe = _replan(current, post, probe, event, rule)
        current = post
        if on_event:
            on_event(event, post)


def _replan(pre: Configuration, post: Configuration, decisions, event: TraceEvent, rule: Rule):
    """Refresh only decisions whose window saw a change this round."""
    changed = set()
    for mv in event.moves:
        if mv.src != mv.dst or pre.robots[mv.id].color is not mv.color:
            changed.add(mv.src)
            changed.add(mv.dst)
    if not changed:
        return decisions
    where = {r.pos: rid for rid, r in post.robots.items()}
    dirty = {
        where[c]
        for i, j in changed
        for di, dj in WINDOW
        if (c := (i + di, j + dj)) in where
    }
    return {**decisions, **plan(post, dirty, rule)}


def replay(initial: Configuration, activations: Sequence[Iterable[int]], *, rule: Rule = decide):
    """Re-execute recorded activation sets; returns the digest after each round."""
    current = initial
    digests = []
    for k, act in enumerate(activations, start=1):
        current, event = step(current, act, rule=rule, round=k)
        digests.append(event.digest)
    return current, digests


__all__ = [
    "Color",
    "CollisionError",
    "FullSync",
    "Outcome",
    "OutcomeKind",
    "RandomFair",
    "RoundRobin",
    "RunResult",
    "Scripted",
    "SingletonSweep",
    "default_cap",
    "next_activation",
    "plan",
    "replay",
    "run",
    "step",
]
