"""Command-line interface: run scenarios, execute experiment presets, emit
plot series and validate scenario files.

Exit codes: 0 success, 1 scenario/validation error, 2 run failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .environment import ScenarioError
from .metrics import aggregate
from .plots import emit_plot_data
from .presets import PRESETS, build_preset
from .scenario_io import emit_scenario, parse_scenario
from .simulation import RunResult, Scenario, Simulation

RUN_COLUMNS = ["scenario", "strategy", "seed", "n_robots", "cp", "tt",
               "group", "order", "timed_out", "collisions", "corrections"]
AGG_COLUMNS = ["scenario", "strategy", "n_runs", "cp_mean", "cp_std",
               "tt_mean", "tt_std", "group_mean", "group_std",
               "order_mean", "order_std"]


def _run_row(result: RunResult, n_robots: int) -> list:
    return [result.scenario, result.strategy, result.seed, n_robots,
            repr(result.cp), repr(result.tt), repr(result.group),
            repr(result.order), int(result.timed_out), result.collisions,
            result.corrections]


def _write_runs_csv(path: Path, rows: list[list]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RUN_COLUMNS)
        writer.writerows(rows)


def _write_aggregate_csv(path: Path, aggregates: list) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(AGG_COLUMNS)
        for a in aggregates:
            writer.writerow([a.scenario, a.strategy, a.n_runs,
                             repr(a.cp_mean), repr(a.cp_std),
                             repr(a.tt_mean), repr(a.tt_std),
                             repr(a.group_mean), repr(a.group_std),
                             repr(a.order_mean), repr(a.order_std)])


def _execute(scenario: Scenario, trace_path: Path | None) -> RunResult:
    trace = [] if trace_path is not None else None
    result = Simulation(scenario).run(trace=trace)
    if trace_path is not None:
        trace_path.parent.mkdir(parents=True, exist_ok=True)
        trace_path.write_text("\n".join(trace) + "\n")
    return result


def _cmd_run(args) -> int:
    try:
        scenario = parse_scenario(Path(args.scenario).read_text())
        if args.seed is not None:
            from dataclasses import replace
            scenario = replace(scenario, seed=args.seed)
    except (ScenarioError, OSError) as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 1
    out_dir = Path(args.out) if args.out else Path(".")
    trace_path = None
    if args.trace:
        trace_dir = Path(args.trace)
        trace_path = trace_dir / f"trace_{scenario.name.replace('/', '_')}_{scenario.seed}.ndjson"
    try:
        result = _execute(scenario, trace_path)
    except Exception as exc:  # noqa: BLE001 - surfaced as run failure
        print(f"run failure: {exc}", file=sys.stderr)
        return 2
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_runs_csv(out_dir / "runs.csv", [_run_row(result, len(scenario.robots))])
    print(f"{scenario.name} strategy={scenario.strategy} seed={scenario.seed}: "
          f"CP={result.cp:.2f}% TT={result.tt:.2f}s G={result.group:.3f}m "
          f"O={result.order:.3f}m/s timed_out={result.timed_out} "
          f"[{result.wall_s:.1f}s wall]")
    return 0


def _cmd_preset(args) -> int:
    try:
        batches = build_preset(args.name, args.seed, args.runs)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 1
    preset = PRESETS[args.name]
    out_dir = Path(args.out) if args.out else Path(args.name)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_traces = preset.trace_by_default if args.trace is None else args.trace

    rows, aggregates = [], []
    for variant, scenarios in batches:
        results = []
        for scenario in scenarios:
            trace_path = None
            if write_traces:
                trace_path = out_dir / "traces" / (
                    f"trace_{variant}_{scenario.seed}.ndjson")
            try:
                result = _execute(scenario, trace_path)
            except Exception as exc:  # noqa: BLE001
                print(f"run failure in {scenario.name} seed={scenario.seed}: {exc}",
                      file=sys.stderr)
                return 2
            results.append(result)
            rows.append(_run_row(result, len(scenario.robots)))
            print(f"  {scenario.name} seed={scenario.seed}: CP={result.cp:.2f}% "
                  f"TT={result.tt:.1f}s [{result.wall_s:.1f}s wall]",
                  file=sys.stderr)
        aggregates.append(aggregate(results))
    _write_runs_csv(out_dir / "runs.csv", rows)
    _write_aggregate_csv(out_dir / "aggregate.csv", aggregates)
    for a in aggregates:
        print(f"{a.scenario} [{a.strategy}] n={a.n_runs}: "
              f"CP {a.cp_mean:.2f}±{a.cp_std:.2f}% "
              f"TT {a.tt_mean:.1f}±{a.tt_std:.1f}s "
              f"G {a.group_mean:.2f}±{a.group_std:.2f}m "
              f"O {a.order_mean:.2f}±{a.order_std:.2f}m/s")
    return 0


def _cmd_plot(args) -> int:
    written = emit_plot_data(Path(args.trace_dir), Path(args.out))
    for path in written:
        print(path)
    return 0


def _cmd_validate(args) -> int:
    try:
        scenario = parse_scenario(Path(args.scenario).read_text())
    except (ScenarioError, OSError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1
    print(f"ok: {scenario.name} ({len(scenario.robots)} robots, "
          f"strategy {scenario.strategy})")
    return 0


def _cmd_emit(args) -> int:
    try:
        batches = build_preset(args.name, args.seed, 1)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 1
    variant, scenarios = batches[args.variant_index]
    print(emit_scenario(scenarios[0]))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmcover",
        description="Deterministic multi-robot coverage simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario file")
    p_run.add_argument("scenario")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--trace", default=None, help="directory for the trace file")
    p_run.add_argument("--out", default=None, help="directory for runs.csv")
    p_run.set_defaults(func=_cmd_run)

    p_preset = sub.add_parser("preset", help="run an experiment preset")
    p_preset.add_argument("name", choices=sorted(PRESETS))
    p_preset.add_argument("--seed", type=int, default=0)
    p_preset.add_argument("--runs", type=int, default=None)
    p_preset.add_argument("--out", default=None)
    trace_group = p_preset.add_mutually_exclusive_group()
    trace_group.add_argument("--trace", dest="trace", action="store_true", default=None)
    trace_group.add_argument("--no-trace", dest="trace", action="store_false")
    p_preset.set_defaults(func=_cmd_preset)

    p_plot = sub.add_parser("plot", help="emit plot series from traces")
    p_plot.add_argument("trace_dir")
    p_plot.add_argument("--out", required=True)
    p_plot.set_defaults(func=_cmd_plot)

    p_val = sub.add_parser("validate", help="validate a scenario file")
    p_val.add_argument("scenario")
    p_val.set_defaults(func=_cmd_validate)

    p_emit = sub.add_parser("emit", help="print a preset's scenario document")
    p_emit.add_argument("name", choices=sorted(PRESETS))
    p_emit.add_argument("--seed", type=int, default=0)
    p_emit.add_argument("--variant-index", type=int, default=0)
    p_emit.set_defaults(func=_cmd_emit)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
