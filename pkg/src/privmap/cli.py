"""Command-line entry points.

Five subcommands: calibrate a model from a labeled trace, replay a trace
against a model, simulate seeded scenario sets, compare two report
directories, and bench per-window latency. Exit codes: 0 success, 1 usage
error, 2 data or IO error.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import functools
import os
import sys

from . import _backend
from .bench import format_result, run_bench
from .engine import Engine
from .errors import ConfigError, PrivmapError
from .formats import (
    ReportBundle,
    comparison_lines,
    emit_report,
    format_number,
    parse_trace,
    read_metrics,
    read_model,
    write_model,
    write_trace,
)
from .ladder import PrivilegeLadder
from .metrics import MetricsCounters, MetricsReport, merge, rates, record
from .scores import GroundTruth
from .simulator import run_sessions, scenario_from_config

__all__ = ["main", "build_parser"]


def _u64(raw: str) -> int:
    value = int(raw)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="privmap",
        description="Behavior-score privilege mapping: calibrate, replay, simulate, compare, bench.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cal = sub.add_parser("calibrate", help="fit bubbles and densities from a labeled trace")
    cal.add_argument("--trace", required=True, help="input trace CSV with ground truth")
    cal.add_argument("--out", required=True, help="output model file")
    cal.add_argument("--levels", type=int, default=4, help="privilege levels (default 4)")
    cal.add_argument("--pad", type=float, default=0.01, help="boundary pad (default 0.01)")
    cal.add_argument("--min-gap", type=float, default=0.01, help="minimum slack width (default 0.01)")
    cal.set_defaults(func=_cmd_calibrate)

    rep = sub.add_parser("replay", help="run a trace through a saved model and write a report")
    rep.add_argument("--model", required=True, help="model file from calibrate")
    rep.add_argument("--trace", required=True, help="trace CSV to replay")
    rep.add_argument("--report", required=True, help="output report directory")
    rep.set_defaults(func=_cmd_replay)

    sim = sub.add_parser("simulate", help="run a seeded scenario set and write traces + reports")
    sim.add_argument("--config", required=True, help="scenario config file")
    sim.add_argument("--seed", type=_u64, default=None, help="override the scenario seed")
    sim.add_argument("--out", required=True, help="output directory")
    sim.set_defaults(func=_cmd_simulate)

    cmp_ = sub.add_parser("compare", help="print rate deltas between two report directories")
    cmp_.add_argument("--report-a", required=True, help="first report directory")
    cmp_.add_argument("--report-b", required=True, help="second report directory")
    cmp_.set_defaults(func=_cmd_compare)

    ben = sub.add_parser("bench", help="measure per-window engine latency")
    ben.add_argument("--windows", type=int, default=20_000, help="windows to time (default 20000)")
    ben.add_argument(
        "--backend",
        choices=("python", "compiled"),
        default=None,
        help="kernel backend to time (default: whichever is active)",
    )
    ben.add_argument(
        "--compare-backends",
        action="store_true",
        help="time every available backend and print a speedup summary",
    )
    ben.set_defaults(func=_cmd_bench)
    return parser


def _cmd_calibrate(args: argparse.Namespace) -> int:
    samples = parse_trace(args.trace)
    legit = [s.score for s in samples if s.ground_truth is GroundTruth.LEGIT]
    illegit = [s.score for s in samples if s.ground_truth is GroundTruth.ILLEGIT]
    engine = Engine.from_training(
        legit,
        illegit,
        ladder=PrivilegeLadder(args.levels),
        pad=args.pad,
        min_gap=args.min_gap,
    )
    write_model(engine.model_spec(), args.out)
    bubbles = engine.bubbles
    print(
        f"calibrated alpha={format_number(bubbles.alpha)} beta={format_number(bubbles.beta)} "
        f"from {len(legit)} legit / {len(illegit)} illegit scores -> {args.out}"
    )
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    spec = read_model(args.model)
    samples = parse_trace(args.trace)
    engine = Engine.from_model(spec)
    counters = MetricsCounters()
    decisions = []
    for sample in samples:
        decision = engine.process_window(sample)
        decisions.append(decision)
        if sample.ground_truth is not None:
            record(counters, sample.ground_truth, decision)
    emit_report(ReportBundle(engine_counters=counters, decisions=decisions), args.report)
    report = rates(counters)
    print(
        f"replayed {len(samples)} windows, {counters.total()} labeled; "
        f"acc={format_number(report.acc)} -> {args.report}"
    )
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(args.config, "r", encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ConfigError(f"cannot open config: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"{args.config}: {exc}") from exc
    scenario, sessions = scenario_from_config(parser)
    if args.seed is not None:
        scenario = dataclasses.replace(scenario, seed=str(args.seed))

    results = run_sessions(scenario, sessions)

    traces_dir = os.path.join(args.out, "traces")
    os.makedirs(traces_dir, exist_ok=True)
    for index, result in enumerate(results):
        write_trace(result.trace, os.path.join(traces_dir, f"session_{index:03d}.csv"))

    engine_counters = functools.reduce(merge, (r.engine_counters for r in results))
    baseline_counters = functools.reduce(merge, (r.baseline_counters for r in results))
    decisions = [d for result in results for d in result.decisions]
    emit_report(
        ReportBundle(
            engine_counters=engine_counters,
            decisions=decisions,
            baseline_counters=baseline_counters,
        ),
        os.path.join(args.out, "report"),
    )
    emit_report(ReportBundle(engine_counters=baseline_counters), os.path.join(args.out, "baseline"))

    engine_report = rates(engine_counters)
    baseline_report = rates(baseline_counters)
    print(
        f"simulated {sessions} session(s) x {scenario.window_count} windows; "
        f"engine acc={format_number(engine_report.acc)} "
        f"baseline acc={format_number(baseline_report.acc)} -> {args.out}"
    )
    return 0


def _report_from_values(values: dict) -> MetricsReport:
    def count(key: str) -> int:
        value = values.get(key)
        return int(value) if value is not None else 0

    def rate(key: str):
        value = values.get(key)
        return None if value is None else float(value)

    return MetricsReport(
        ta=count("ta"),
        tr=count("tr"),
        fa=count("fa"),
        fr=count("fr"),
        acc=rate("acc"),
        prec=rate("prec"),
        tar=rate("tar"),
        trr=rate("trr"),
        far=rate("far"),
        frr=rate("frr"),
    )


def _cmd_compare(args: argparse.Namespace) -> int:
    report_a = _report_from_values(read_metrics(os.path.join(args.report_a, "metrics.txt")))
    report_b = _report_from_values(read_metrics(os.path.join(args.report_b, "metrics.txt")))
    for line in comparison_lines(report_a, report_b, label_a="a", label_b="b"):
        print(line)
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    if args.compare_backends:
        names = _backend.available_backends()
        results = [run_bench(args.windows, backend=name) for name in names]
        for index, result in enumerate(results):
            if index:
                print()
            print(format_result(result))
        if len(results) == 2:
            by_name = {result.backend: result for result in results}
            speedup = by_name["python"].total_s / by_name["compiled"].total_s
            print()
            print(f"speedup compiled-vs-python = {speedup:.6g}x")
        return 0
    result = run_bench(args.windows, backend=args.backend)
    print(format_result(result))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems and 0 on --help
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except PrivmapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ImportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
