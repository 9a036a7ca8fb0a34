"""Exhaustive explicit-state exploration of the SSYNC transition system.

States are id-free (the sorted tuple of occupied cells with colours), so
two configurations that differ only in robot labels are the same state.
No symmetry reduction is applied: the shared compass breaks reflections.

Successors of a state are step(state, A) over every nonempty activation
set A. Activating a robot whose decision is a no-op changes nothing, so
only subsets of the robots with a non-trivial decision need enumerating;
the successor set is identical to full 2^k - 1 branching, plus a stutter
self-loop whenever some robot would idle.
"""

from __future__ import annotations

import logging
import math
import random
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from . import monitors
from .grid import Coord, GridDims
from .model import Configuration, canonical_digest, is_final
from .rules import Rule, decide
from .sim import apply_plan, plan, step

log = logging.getLogger(__name__)

State = tuple[tuple[int, int, str], ...]

#: ceiling on C(m*n, ceil(m*n/2)) for enumerate_initials
INITIALS_LIMIT = 200_000
#: robots with a non-trivial move beyond which subsets are sampled
DEFAULT_SUBSET_LIMIT = 6
SAMPLED_SUBSETS = 32


class BudgetExceeded(RuntimeError):
    pass


def enumerate_initials(dims: GridDims, limit: int = INITIALS_LIMIT) -> Iterator[Configuration]:
    """Every placement of ceil(m*n/2) green robots on distinct nodes."""
    k = dims.robot_count
    total = math.comb(dims.nodes, k)
    if total > limit:
        raise BudgetExceeded(f"{total} initial placements exceed budget {limit}")
    nodes = list(dims.coords())
    for chosen in combinations(nodes, k):
        yield Configuration.greens(dims, chosen)


def _activation_sets(movers: Sequence[int], limit: int, rng: random.Random) -> tuple[list, bool]:
    if len(movers) <= limit:
        sets = [c for r in range(1, len(movers) + 1) for c in combinations(movers, r)]
        return sets, False
    sets = {(i,) for i in movers}
    sets.add(tuple(movers))
    want = min(len(movers) + 1 + SAMPLED_SUBSETS, 2 ** len(movers) - 1)
    while len(sets) < want:
        pick = tuple(i for i in movers if rng.random() < 0.5)
        if pick:
            sets.add(pick)
    return sorted(sets), True


@dataclass
class Expansion:
    state: State
    successors: list  # (activated coords, child state)
    violations: list
    stutter: bool
    quiescent: bool
    sampled: bool


def expand(
    dims: GridDims, state: State, rule: Rule = decide, subset_limit: int = DEFAULT_SUBSET_LIMIT
) -> Expansion:
    config = Configuration.from_cells(dims, state)
    decisions = plan(config, rule=rule)
    movers = sorted(rid for rid, (_, a) in decisions.items() if not a.is_noop)
    rng = random.Random(canonical_digest(config))
    subsets, sampled = _activation_sets(movers, subset_limit, rng)
    successors = []
    violations = []
    for act in subsets:
        sub = {rid: decisions[rid] for rid in act}
        off = [
            rid for rid, (_, a) in sub.items()
            if a.move is not None and not dims.contains(a.move.apply(config.robots[rid].pos))
        ]
        if off:
            violations.extend(
                monitors.Violation(
                    monitors.Kind.ILLEGAL_MOVE, None, (rid,), (config.robots[rid].pos,),
                    "move off the grid", canonical_digest(config),
                )
                for rid in off
            )
            continue
        post, event = apply_plan(config, sub)
        bad = monitors.check_step(config, event, post)
        coords = tuple(sorted(config.robots[rid].pos for rid in act))
        child = post.cells()
        if bad:
            violations.extend(
                monitors.Violation(v.kind, None, v.ids, v.coords, v.detail, canonical_digest(config)) for v in bad
            )
        successors.append((coords, child))
    return Expansion(
        state=state,
        successors=successors,
        violations=violations,
        stutter=len(movers) < len(decisions),
        quiescent=not movers and not all(c == "R" for _, _, c in state),
        sampled=sampled,
    )


@dataclass
class StateGraph:
    """Explored states with forward edges and a BFS parent per state."""

    dims: GridDims
    states: list[State] = field(default_factory=list)
    index: dict[State, int] = field(default_factory=dict)
    succ: list[set[int]] = field(default_factory=list)
    parent: list[tuple[int, tuple[Coord, ...]] | None] = field(default_factory=list)
    closed: bool = True

    def add(self, state: State, parent: tuple[int, tuple[Coord, ...]] | None) -> tuple[int, bool]:
        idx = self.index.get(state)
        if idx is not None:
            return idx, False
        idx = len(self.states)
        self.states.append(state)
        self.index[state] = idx
        self.succ.append(set())
        self.parent.append(parent)
        return idx, True

    def config(self, idx: int) -> Configuration:
        return Configuration.from_cells(self.dims, self.states[idx])

    def digest(self, idx: int) -> str:
        return canonical_digest(self.config(idx))

    def is_final(self, idx: int) -> bool:
        return all(c == "R" for _, _, c in self.states[idx])

    def witness(self, idx: int) -> tuple[Configuration, list[tuple[Coord, ...]]]:
        """Initial configuration and the activation sets (as robot positions) reaching ``idx``."""
        schedule = []
        while self.parent[idx] is not None:
            idx, coords = self.parent[idx]
            schedule.append(coords)
        schedule.reverse()
        return self.config(idx), schedule


def replay_witness(
    initial: Configuration, schedule: Sequence[Iterable[Coord]], rule: Rule = decide
) -> Configuration:
    """Drive the simulator along a witness schedule given as robot positions."""
    current = initial
    for rnd, coords in enumerate(schedule, start=1):
        by_pos = {r.pos: rid for rid, r in current.robots.items()}
        current, _ = step(current, {by_pos[tuple(c)] for c in coords}, rule=rule, round=rnd)
    return current


def verify_final_reachability(graph: StateGraph) -> tuple[bool, str | None]:
    """True iff every explored state can reach an all-red state.

    Backward closure from the final states; the first state outside it is
    returned as the counterexample digest.
    """
    if not graph.closed:
        raise ValueError("final reachability needs a closed (untruncated) exploration")
    pred: list[list[int]] = [[] for _ in graph.states]
    for a, outs in enumerate(graph.succ):
        for b in outs:
            pred[b].append(a)
    seen = [graph.is_final(k) for k in range(len(graph.states))]
    queue = deque(k for k, f in enumerate(seen) if f)
    while queue:
        b = queue.popleft()
        for a in pred[b]:
            if not seen[a]:
                seen[a] = True
                queue.append(a)
    for k, ok in enumerate(seen):
        if not ok:
            return False, graph.digest(k)
    return True, None


@dataclass
class ExplorationReport:
    dims: GridDims
    initial_count: int = 0
    reachable_states: int = 0
    transitions: int = 0
    violations: list = field(default_factory=list)
    quiescent_non_final: list[str] = field(default_factory=list)
    final_reachable: bool | None = None
    counterexample: str | None = None
    peak_frontier: int = 0
    wall_time: float = 0.0
    final_states: int = 0
    sampled: bool = False
    truncated: bool = False
    graph: StateGraph | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return (
            not self.violations
            and not self.quiescent_non_final
            and self.final_reachable is True
            and not self.truncated
        )

    def violation_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for v in self.violations:
            counts[v.kind.value] = counts.get(v.kind.value, 0) + 1
        return counts

    def to_json(self) -> dict:
        return {
            "rows": self.dims.m,
            "cols": self.dims.n,
            "initialCount": self.initial_count,
            "reachableStates": self.reachable_states,
            "transitions": self.transitions,
            "finalStates": self.final_states,
            "violationCounts": self.violation_counts(),
            "violations": [v.to_json() for v in self.violations[:100]],
            "quiescentNonFinal": self.quiescent_non_final,
            "finalReachable": self.final_reachable,
            "counterexample": self.counterexample,
            "peakFrontier": self.peak_frontier,
            "wallTime": round(self.wall_time, 3),
            "sampled": self.sampled,
            "truncated": self.truncated,
            "ok": self.ok,
        }


def _expand_args(args):
    return expand(*args)


def explore(
    dims: GridDims,
    initials: Iterable[Configuration] | None = None,
    *,
    max_states: int = 2_000_000,
    subset_limit: int = DEFAULT_SUBSET_LIMIT,
    rule: Rule = decide,
    row_order: bool = True,
    jobs: int = 1,
) -> ExplorationReport:
    """Breadth-first closure from ``initials`` (default: all placements)."""
    t0 = time.perf_counter()
    initials = enumerate_initials(dims) if initials is None else initials
    graph = StateGraph(dims)
    report = ExplorationReport(dims, graph=graph)

    def visit_state(idx: int) -> None:
        for v in monitors.check_state(graph.config(idx), row_order_check=row_order):
            report.violations.append(
                monitors.Violation(v.kind, None, v.ids, v.coords, v.detail, graph.digest(idx))
            )
        if graph.is_final(idx):
            report.final_states += 1
            for v in monitors.check_final(graph.config(idx)):
                report.violations.append(
                    monitors.Violation(v.kind, None, v.ids, v.coords, v.detail, graph.digest(idx))
                )

    frontier: list[int] = []
    for cfg in initials:
        if cfg.dims != dims:
            raise ValueError("initial configuration has different dimensions")
        report.initial_count += 1
        idx, new = graph.add(cfg.cells(), None)
        if new:
            visit_state(idx)
            frontier.append(idx)

    pool = ProcessPoolExecutor(jobs) if jobs > 1 else None
    try:
        while frontier:
            report.peak_frontier = max(report.peak_frontier, len(frontier))
            args = [(dims, graph.states[k], rule, subset_limit) for k in frontier]
            if pool is not None:
                results = list(pool.map(_expand_args, args, chunksize=64))
            else:
                results = [expand(*a) for a in args]
            nxt: list[int] = []
            for src, exp in zip(frontier, results):
                report.violations.extend(exp.violations)
                report.sampled |= exp.sampled
                if exp.quiescent:
                    report.quiescent_non_final.append(graph.digest(src))
                if exp.stutter:
                    graph.succ[src].add(src)
                report.transitions += len(exp.successors) + exp.stutter
                for coords, child in exp.successors:
                    if child not in graph.index and len(graph.states) >= max_states:
                        report.truncated = True
                        graph.closed = False
                        continue
                    idx, new = graph.add(child, (src, coords))
                    graph.succ[src].add(idx)
                    if new:
                        visit_state(idx)
                        nxt.append(idx)
            frontier = nxt
            log.debug("level done: %d states, frontier %d", len(graph.states), len(frontier))
    finally:
        if pool is not None:
            pool.shutdown()

    report.reachable_states = len(graph.states)
    if graph.closed:
        report.final_reachable, report.counterexample = verify_final_reachability(graph)
    report.wall_time = time.perf_counter() - t0
    return report
