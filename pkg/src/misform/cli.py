"""Command-line driver: ``misform simulate | explore | verify-mis``.

Exit codes
  simulate:   0 completed, 1 violation or deadlock, 2 round cap hit, 3 usage error
  explore:    0 clean, 1 violation/deadlock/unreachable final, 2 budget exceeded, 3 usage error
  verify-mis: 0 is an MIS, 1 is not, 3 usage error
"""

from __future__ import annotations

import argparse
import importlib
import json
import logging
import sys
from pathlib import Path

from .explorer import DEFAULT_SUBSET_LIMIT, BudgetExceeded, enumerate_initials, explore
from .grid import BRUTE_FORCE_LIMIT, GridDims, brute_force_max_independent_size, is_maximum_independent
from .io import (
    ConfigError,
    FrameSink,
    RunConfig,
    TraceWriter,
    config_from_json,
    final_from_trace,
    load_run_config,
    make_scheduler,
    read_trace,
)
from .model import Configuration
from .placements import named_placement
from .rules import decide
from .sim import OutcomeKind, default_cap, run

log = logging.getLogger("misform")

EXIT_OK, EXIT_FAIL, EXIT_BUDGET, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which means "cap" here
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_rule(spec: str | None):
    """``module:function`` alternative decision rule (fault injection)."""
    if not spec:
        return decide
    mod, _, fn = spec.partition(":")
    try:
        return getattr(importlib.import_module(mod), fn)
    except (ImportError, AttributeError, ValueError) as exc:
        raise UsageError(f"cannot load rule {spec!r}: {exc}") from exc


def _dims(args) -> GridDims | None:
    if args.rows is None and args.cols is None:
        return None
    if args.rows is None or args.cols is None:
        raise UsageError("--rows and --cols go together")
    try:
        return GridDims(args.rows, args.cols)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_simulate(args) -> int:
    dims = _dims(args)
    if (args.placement is None) == (args.config is None):
        raise UsageError("give exactly one of --placement or --config")
    if args.config:
        rc = load_run_config(args.config)
        if dims is not None and dims != rc.config.dims:
            raise UsageError(f"--rows/--cols disagree with {args.config}")
    else:
        if dims is None:
            raise UsageError("--placement needs --rows and --cols")
        try:
            rc = RunConfig(named_placement(dims, args.placement, args.seed or 0))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    if args.scheduler:
        try:
            rc.scheduler = make_scheduler(args.scheduler, seed=args.seed or 0, p=args.p, k=args.k)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    if args.max_rounds is not None:
        rc.max_rounds = args.max_rounds
    if args.no_monitors:
        rc.monitors = False
    trace_path = args.trace or rc.trace
    frames_path = args.frames or rc.frames
    config = rc.config
    cap = default_cap(config.dims) if rc.max_rounds is None else rc.max_rounds
    rule = _load_rule(args.rule)

    trace_fh = open(trace_path, "w", encoding="utf-8") if trace_path else None
    writer = TraceWriter(trace_fh) if trace_fh else None
    frames = FrameSink(frames_path) if frames_path else None
    try:
        if writer:
            writer.header(config)
        if frames:
            frames.add(0, config)

        def on_event(ev, post):
            if writer:
                writer.event(ev)
            if frames:
                frames.add(ev.round, post)

        try:
            result = run(
                config, rc.scheduler, cap, monitor=rc.monitors, rule=rule,
                allow_nonstandard=args.allow_nonstandard, on_event=on_event,
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    finally:
        if trace_fh:
            trace_fh.close()
        if frames:
            frames.close()

    out = result.outcome
    print(f"outcome: {out}")
    print(f"rounds: {out.rounds}")
    print(f"moves: {result.moves}")
    print(f"color changes: {result.color_changes}")
    print(f"violations: {len(out.violations)}")
    for v in out.violations:
        print(f"  {v.kind}: {v.detail} {list(v.coords)}")
    return {
        OutcomeKind.COMPLETED: EXIT_OK,
        OutcomeKind.ROUND_CAP_EXCEEDED: EXIT_BUDGET,
    }.get(out.kind, EXIT_FAIL)


def cmd_explore(args) -> int:
    dims = _dims(args)
    if dims is None:
        raise UsageError("explore needs --rows and --cols")
    if args.initial and args.all_initials:
        raise UsageError("--initial and --all-initials are exclusive")
    if args.initial:
        try:
            raw = json.loads(Path(args.initial).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read {args.initial}: {exc}") from exc
        items = raw if isinstance(raw, list) else [raw]
        try:
            initials = [config_from_json({"rows": dims.m, "cols": dims.n, **it}) for it in items]
        except ConfigError as exc:
            raise UsageError(str(exc)) from exc
    else:
        try:
            initials = list(enumerate_initials(dims))
        except BudgetExceeded as exc:
            print(f"budget exceeded: {exc}")
            return EXIT_BUDGET
    report = explore(
        dims,
        initials,
        subset_limit=args.subset_budget,
        max_states=args.max_states,
        rule=_load_rule(args.rule),
        jobs=args.jobs,
    )
    doc = report.to_json()
    Path(args.report).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    print(
        f"{dims.m}x{dims.n}: {report.initial_count} initials, {report.reachable_states} states, "
        f"{report.transitions} transitions, {len(report.violations)} violations, "
        f"{len(report.quiescent_non_final)} deadlocks, final reachable: {report.final_reachable}"
    )
    if report.counterexample:
        print(f"counterexample: {report.counterexample}")
    for v in report.violations[:5]:
        print(f"  {v.kind} at {v.digest}: {v.detail}")
    if report.truncated or (report.sampled and not args.allow_sampled):
        print("budget exceeded: exploration was truncated or subset-sampled")
        return EXIT_BUDGET
    if report.violations or report.quiescent_non_final or report.final_reachable is not True:
        return EXIT_FAIL
    return EXIT_OK


def _parse_nodes(text: str) -> set[tuple[int, int]]:
    nodes = set()
    try:
        for part in filter(None, (p.strip() for p in text.split(";"))):
            i, j = part.split(",")
            nodes.add((int(i), int(j)))
    except ValueError as exc:
        raise UsageError(f"cannot parse --nodes {text!r}") from exc
    return nodes


def cmd_verify_mis(args) -> int:
    if (args.nodes is None) == (args.from_final is None):
        raise UsageError("give exactly one of --nodes or --from-final")
    if args.nodes is not None:
        dims = _dims(args)
        if dims is None:
            raise UsageError("--nodes needs --rows and --cols")
        nodes = _parse_nodes(args.nodes)
    else:
        try:
            initial, events = read_trace(args.from_final)
        except (OSError, ConfigError) as exc:
            raise UsageError(str(exc)) from exc
        final: Configuration = final_from_trace(initial, events)
        dims = final.dims
        nodes = final.positions()
    try:
        ok = is_maximum_independent(dims, nodes)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(f"{len(nodes)} nodes, closed-form maximum {dims.robot_count}: {'MIS' if ok else 'not an MIS'}")
    if args.oracle or dims.nodes <= BRUTE_FORCE_LIMIT:
        if dims.nodes <= BRUTE_FORCE_LIMIT:
            best = brute_force_max_independent_size(dims)
            print(f"brute-force maximum: {best}")
            if best != dims.robot_count:
                print("brute-force maximum disagrees with the closed form")
                return EXIT_FAIL
        else:
            print(f"brute-force oracle skipped: {dims.nodes} nodes > {BRUTE_FORCE_LIMIT}")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="misform", description="MIS formation by myopic luminous robots on a grid")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def grid_args(sp):
        sp.add_argument("--rows", type=int)
        sp.add_argument("--cols", type=int)

    s = sub.add_parser("simulate", help="run the protocol under a scheduler")
    grid_args(s)
    s.add_argument("--placement", help="random | target | packed-ne|packed-se|packed-sw|packed-nw")
    s.add_argument("--config", help="run-config JSON file")
    s.add_argument("--scheduler", help="fullsync | random | round-robin | singleton")
    s.add_argument("--seed", type=int)
    s.add_argument("--p", type=float, default=0.5, help="activation probability for random")
    s.add_argument("--k", type=int, default=1, help="block size for round-robin")
    s.add_argument("--max-rounds", type=int)
    s.add_argument("--trace", help="write JSON Lines trace here")
    s.add_argument("--frames", help="write frames here (.svg for a single SVG)")
    s.add_argument("--no-monitors", action="store_true")
    s.add_argument("--allow-nonstandard", action="store_true", help=argparse.SUPPRESS)
    s.add_argument("--rule", help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("explore", help="exhaustively explore a small grid")
    grid_args(e)
    e.add_argument("--all-initials", action="store_true", help="every placement (the default)")
    e.add_argument("--initial", help="JSON file with one configuration or a list of them")
    e.add_argument("--subset-budget", type=int, default=DEFAULT_SUBSET_LIMIT,
                   help="max enabled robots for full subset branching")
    e.add_argument("--allow-sampled", action="store_true")
    e.add_argument("--max-states", type=int, default=2_000_000)
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--report", required=True)
    e.add_argument("--rule", help=argparse.SUPPRESS)
    e.set_defaults(func=cmd_explore)

    v = sub.add_parser("verify-mis", help="check a node set is a maximum independent set")
    grid_args(v)
    v.add_argument("--nodes", help='"i,j;i,j;..."')
    v.add_argument("--from-final", help="trace file; checks the final occupied nodes")
    v.add_argument("--oracle", action="store_true", help="also report the brute-force maximum")
    v.set_defaults(func=cmd_verify_mis)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
