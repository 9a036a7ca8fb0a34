"""Acceptance criteria 1-8; each test records one PASS/FAIL line."""

from __future__ import annotations

import io
import json
import math
import random
import time

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from misform.explorer import explore
from misform.grid import GridDims, brute_force_max_independent_size, is_maximum_independent, reference_mis
from misform.io import TraceWriter
from misform.model import Configuration, TraceEvent
from misform.monitors import Kind
from misform.placements import random_placement, target_preset
from misform.rules import decide
from misform.sim import FullSync, OutcomeKind, RandomFair, default_cap, replay, run, step
from misform.grid import View, extract_view

from conftest import ACCEPTANCE, reachable_configs

STEP_KINDS = {
    Kind.COLLISION_TYPE1, Kind.COLLISION_TYPE2, Kind.RED_MOVED,
    Kind.RED_RECOLORED, Kind.ILLEGAL_TRANSITION, Kind.ILLEGAL_MOVE,
}
STATE_KINDS = {Kind.FINAL_NOT_MIS, Kind.RED_OFF_TARGET, Kind.RED_ADJACENT, Kind.ROW_ORDER}
SMALL = {(2, 2): 6, (2, 3): 20, (3, 2): 20, (3, 3): 126}


def record(k: int, ok: bool, detail: str) -> None:
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE[k] = line
    print(line)


@pytest.fixture(scope="module")
def small_reports():
    return {md: explore(GridDims(*md)) for md in SMALL}


def test_criterion_1_closed_form_maximum():
    t0 = time.perf_counter()
    bad = []
    for m in range(2, 5):
        for n in range(2, 5):
            d = GridDims(m, n)
            if brute_force_max_independent_size(d) != math.ceil(m * n / 2):
                bad.append((m, n, "brute force"))
            if not is_maximum_independent(d, reference_mis(d)):
                bad.append((m, n, "reference set"))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 10
    record(1, ok, f"9 grids 2..4 x 2..4, {len(bad)} mismatches, {dt:.2f}s of 10s")
    assert ok, bad


def test_criterion_2_no_collisions_exhaustive(small_reports):
    problems = []
    for md, rep in small_reports.items():
        if rep.initial_count != SMALL[md] or rep.sampled or rep.truncated:
            problems.append(f"{md}: incomplete exploration")
        problems += [f"{md}: {v.kind} at {v.digest}" for v in rep.violations if v.kind in STEP_KINDS]
    states = sum(r.reachable_states for r in small_reports.values())
    edges = sum(r.transitions for r in small_reports.values())
    ok = not problems
    record(2, ok, f"{states} states, {edges} transitions, {len(problems)} step violations")
    assert ok, problems[:10]


def test_criterion_3_finite_rounds_exhaustive(small_reports):
    problems = []
    for md, rep in small_reports.items():
        problems += [f"{md}: deadlock {d}" for d in rep.quiescent_non_final]
        if rep.final_reachable is not True:
            problems.append(f"{md}: final unreachable from {rep.counterexample}")
    ok = not problems
    record(3, ok, f"{len(small_reports)} grids, {len(problems)} deadlocks or unreachable finals")
    assert ok, problems[:10]


def test_criterion_4_state_monitors(small_reports):
    problems = []
    for md, rep in small_reports.items():
        problems += [f"{md}: {v.kind} at {v.digest}" for v in rep.violations if v.kind in STATE_KINDS]
    runs = 0
    for m, n in ((4, 4), (5, 5), (6, 7)):
        d = GridDims(m, n)
        for seed in range(100):
            res = run(random_placement(d, seed), RandomFair(0.5, seed))
            runs += 1
            if res.outcome.kind is not OutcomeKind.COMPLETED:
                problems.append(f"{m}x{n} seed {seed}: {res.outcome}")
            elif res.final.red_positions() != reference_mis(d):
                problems.append(f"{m}x{n} seed {seed}: red set differs from target")
    ok = not problems
    record(4, ok, f"explorations plus {runs} RandomFair runs, {len(problems)} problems")
    assert ok, problems[:10]


def test_criterion_5_scaled_termination():
    t0 = time.perf_counter()
    problems, worst = [], {}
    for k in range(2, 11):
        d = GridDims(k, k)
        cap = default_cap(d)
        for seed in range(100):
            start = random_placement(d, seed)
            for spec in (FullSync(), RandomFair(0.5, seed)):
                res = run(start, spec, cap)
                if res.outcome.kind is not OutcomeKind.COMPLETED:
                    problems.append(f"{k}x{k} seed {seed} {spec}: {res.outcome}")
                worst[k] = max(worst.get(k, 0), res.outcome.rounds)
    dt = time.perf_counter() - t0
    ok = not problems and dt < 60
    rounds = " ".join(f"{k}:{r}" for k, r in sorted(worst.items()))
    record(5, ok, f"1800 runs, {len(problems)} incomplete, max rounds {rounds}, {dt:.1f}s of 60s")
    assert ok, problems[:10] or f"took {dt:.1f}s"


def test_criterion_6_golden_traces():
    d = GridDims(2, 2)
    first = run(Configuration.greens(d, [(1, 2), (2, 1)]), FullSync())
    second = run(target_preset(d), FullSync())
    seq1 = [[mv.guard for mv in ev.moves] for ev in first.trace]
    seq2 = [[mv.guard for mv in ev.moves] for ev in second.trace]
    ok = (
        str(first.outcome) == "Completed in 4 rounds"
        and seq1 == [["G-LEFT", "G-WAIT"], ["G-RED", "G-WAIT"], ["R-FIXED", "G-RIGHT-A"], ["R-FIXED", "G-RED"]]
        and str(second.outcome) == "Completed in 3 rounds"
        and seq2 == [["G-RED", "G-LEFT"], ["R-FIXED", "G-RIGHT-A"], ["R-FIXED", "G-RED"]]
        and first.final.red_positions() == second.final.red_positions() == {(1, 1), (2, 2)}
    )
    record(6, ok, f"{first.outcome}; {second.outcome}")
    assert ok


# -- criterion 7: engine properties ---------------------------------------

CASES = {"purity": 2000, "anonymity": 2000, "conservation": 2000, "red": 2000, "determinism": 1000, "roundtrip": 1000}
SETTINGS = dict(deadline=None, database=None, suppress_health_check=list(HealthCheck))
configs = reachable_configs(2, 5, 30)


def activation(config):
    ids = sorted(config.robots)
    return st.lists(st.sampled_from(ids), min_size=1, unique=True).map(frozenset)


def test_criterion_7_engine_properties():
    counts = dict.fromkeys(CASES, 0)

    @settings(max_examples=CASES["purity"], **SETTINGS)
    @given(configs, st.data())
    def purity(config, data):
        counts["purity"] += 1
        rid = data.draw(st.sampled_from(sorted(config.robots)))
        v = extract_view(config, config.robots[rid].pos)
        twin = View.from_cells({f: getattr(v, f) for f in v.__slots__})
        assert twin == v and decide(twin) == decide(v) == decide(v)

    @settings(max_examples=CASES["anonymity"], **SETTINGS)
    @given(configs, st.data())
    def anonymity(config, data):
        counts["anonymity"] += 1
        ids = sorted(config.robots)
        perm = dict(zip(ids, data.draw(st.permutations([i + 100 for i in ids]))))
        act = data.draw(activation(config))
        a, _ = step(config, act)
        b, _ = step(config.relabel(perm), {perm[i] for i in act})
        assert a.relabel(perm) == b and a.digest() == b.digest()

    @settings(max_examples=CASES["conservation"], **SETTINGS)
    @given(configs, st.data())
    def conservation(config, data):
        counts["conservation"] += 1
        act = data.draw(activation(config))
        post, _ = step(config, act)
        assert set(post.robots) == set(config.robots) and post.distinct
        for rid, r in config.robots.items():
            q = post.robots[rid]
            assert abs(q.pos[0] - r.pos[0]) + abs(q.pos[1] - r.pos[1]) <= 1
            if rid not in act:
                assert q == r

    @settings(max_examples=CASES["red"], **SETTINGS)
    @given(configs, st.data())
    def red_permanence(config, data):
        counts["red"] += 1
        current = config
        for rnd in range(1, 4):
            post, _ = step(current, data.draw(activation(current)), round=rnd)
            for rid, r in current.robots.items():
                if r.color.value == "R":
                    assert post.robots[rid] == r
            current = post

    @settings(max_examples=CASES["determinism"], **SETTINGS)
    @given(st.integers(2, 5), st.integers(2, 5), st.integers(0, 10**6), st.sampled_from([0.2, 0.5, 1.0]))
    def determinism(m, n, seed, p):
        counts["determinism"] += 1
        start = random_placement(GridDims(m, n), seed)
        a = run(start, RandomFair(p, seed))
        b = run(start, RandomFair(p, seed))
        assert a.trace == b.trace and a.outcome == b.outcome and a.final == b.final

    @settings(max_examples=CASES["roundtrip"], **SETTINGS)
    @given(st.integers(2, 5), st.integers(2, 5), st.integers(0, 10**6))
    def roundtrip(m, n, seed):
        counts["roundtrip"] += 1
        start = random_placement(GridDims(m, n), seed)
        buf = io.StringIO()
        writer = TraceWriter(buf)
        writer.header(start)
        res = run(start, RandomFair(0.5, seed), on_event=lambda ev, post: writer.event(ev))
        lines = buf.getvalue().splitlines()
        events = [TraceEvent.from_json(json.loads(x)) for x in lines[1:]]
        assert events == res.trace
        _, digests = replay(start, [ev.activated for ev in events])
        assert digests == [ev.digest for ev in events]

    failures = []
    for prop in (purity, anonymity, conservation, red_permanence, determinism, roundtrip):
        try:
            prop()
        except Exception as exc:  # noqa: BLE001 - reported below
            failures.append(f"{prop.__name__}: {exc!r}"[:300])
    total = sum(counts.values())
    ok = not failures and total >= 10_000
    record(7, ok, f"{total} generated cases over 6 properties, {len(failures)} failing")
    assert ok, failures or total


def test_criterion_8_amendment_gate(small_reports):
    # criteria 2 and 3 gate the build; the amended table must keep 1-7 green
    clean = all(r.ok for r in small_reports.values())
    earlier = [ACCEPTANCE.get(k, "") for k in range(1, 8)]
    if not all(earlier):
        pytest.skip("criteria 1-7 were not all run in this session")
    ok = clean and all(": PASS" in line for line in earlier)
    record(8, ok, "explorations clean and criteria 1-7 green" if ok else "gate closed")
    assert ok
