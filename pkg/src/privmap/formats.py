"""File formats: trace CSV, model files, and report bundles.

Everything here is plain text and deterministic. Traces and models round
trip losslessly (floats are written with repr, the shortest string that
parses back to the same double); reports print numbers with six
significant digits and never embed wall-clock time, so re-emitting an
unchanged bundle reproduces the files byte for byte.
"""

from __future__ import annotations

import configparser
import csv
import math
import os
from array import array
from dataclasses import dataclass, field

from .calibration import BubbleState, DensityModel
from .engine import Decision, ModelSpec
from .errors import ConfigError, TraceFormatError
from .expansion import ExpansionParams
from .ladder import (
    IllegitAction,
    LegitAction,
    MovementPolicy,
    PrivilegeLadder,
    validate_catalog,
)
from .metrics import MetricsCounters, MetricsReport, occupancy_fractions, rates
from .scores import GroundTruth, PasswordEvent, ScoreSample

__all__ = [
    "TRACE_HEADER",
    "write_trace",
    "parse_trace",
    "write_model",
    "read_model",
    "ReportBundle",
    "emit_report",
    "read_metrics",
    "comparison_lines",
    "format_number",
]

TRACE_HEADER = ("window_index", "timestamp_s", "score", "ground_truth", "password_event")

_TRUTH_ABSENT = "-"
_EVENTS = {event.value: event for event in PasswordEvent}
_TRUTHS = {truth.value: truth for truth in GroundTruth}


def write_trace(samples, path: str | os.PathLike) -> None:
    """Write samples as a trace CSV; floats keep full precision."""

    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for sample in samples:
            truth = _TRUTH_ABSENT if sample.ground_truth is None else sample.ground_truth.value
            writer.writerow(
                (
                    sample.window_index,
                    repr(sample.timestamp_s),
                    repr(sample.score),
                    truth,
                    sample.password_event.value,
                )
            )


def parse_trace(path: str | os.PathLike) -> list[ScoreSample]:
    """Read a trace CSV back into validated samples.

    Every failure names the file and line: missing file, malformed
    header, short rows, unparsable fields, out-of-range scores, and
    non-monotone window indices are all distinct messages.
    """

    spath = os.fspath(path)
    try:
        handle = open(spath, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise TraceFormatError(f"cannot open trace: {exc}", path=spath) from exc
    samples: list[ScoreSample] = []
    previous_index: int | None = None
    with handle:
        reader = csv.reader(handle)
        for line, row in enumerate(reader, start=1):
            if line == 1:
                if tuple(row) != TRACE_HEADER:
                    raise TraceFormatError(
                        f"malformed header: expected {','.join(TRACE_HEADER)}",
                        path=spath,
                        line=line,
                    )
                continue
            if not row:
                continue
            if len(row) != len(TRACE_HEADER):
                raise TraceFormatError(
                    f"expected {len(TRACE_HEADER)} fields, got {len(row)}",
                    path=spath,
                    line=line,
                )
            raw_index, raw_ts, raw_score, raw_truth, raw_event = row
            try:
                window_index = int(raw_index)
            except ValueError:
                raise TraceFormatError(
                    f"bad window index {raw_index!r}", path=spath, line=line
                ) from None
            if previous_index is not None and window_index <= previous_index:
                raise TraceFormatError(
                    f"window index must increase: {window_index} after {previous_index}",
                    path=spath,
                    line=line,
                )
            previous_index = window_index
            try:
                timestamp = float(raw_ts)
            except ValueError:
                raise TraceFormatError(
                    f"bad timestamp {raw_ts!r}", path=spath, line=line
                ) from None
            try:
                score = float(raw_score)
            except ValueError:
                raise TraceFormatError(
                    f"bad score {raw_score!r}", path=spath, line=line
                ) from None
            if math.isnan(score) or not 0.0 <= score <= 1.0:
                raise TraceFormatError(
                    f"score out of range [0, 1]: {raw_score}", path=spath, line=line
                )
            if raw_truth == _TRUTH_ABSENT:
                truth = None
            elif raw_truth in _TRUTHS:
                truth = _TRUTHS[raw_truth]
            else:
                raise TraceFormatError(
                    f"bad ground truth {raw_truth!r}", path=spath, line=line
                )
            if raw_event not in _EVENTS:
                raise TraceFormatError(
                    f"bad password event {raw_event!r}", path=spath, line=line
                )
            samples.append(
                ScoreSample(
                    window_index=window_index,
                    timestamp_s=timestamp,
                    score=score,
                    password_event=_EVENTS[raw_event],
                    ground_truth=truth,
                )
            )
    return samples


def _density_lines(name: str, model: DensityModel) -> list[str]:
    points = " ".join(repr(p) for p in model.sample_points)
    return [f"[{name}]", f"bandwidth = {model.bandwidth!r}", f"points = {points}", ""]


def write_model(spec: ModelSpec, path: str | os.PathLike) -> None:
    """Serialize a model bundle as fixed-order key = value sections."""

    lines = [
        "[bubbles]",
        f"alpha = {spec.bubbles.alpha!r}",
        f"beta = {spec.bubbles.beta!r}",
        f"min_gap = {spec.bubbles.min_gap!r}",
        "",
        "[ladder]",
        f"levels = {spec.ladder.level_count}",
        "",
        "[policy]",
        f"mu_l = {spec.policy.mu_l!r}",
        f"mu_a = {spec.policy.mu_a!r}",
        f"lookback = {spec.policy.lookback}",
        f"legit_action = {spec.policy.legit_score_action.value}",
        f"illegit_action = {spec.policy.illegit_score_action.value}",
        "",
        "[expansion]",
        f"w2 = {spec.params.w2!r}",
        f"theta = {spec.params.theta!r}",
        f"v0 = {spec.params.v0!r}",
        f"sigma_a = {spec.params.sigma_a!r}",
        f"r_obs = {spec.params.r_obs!r}",
        f"rescale = {spec.params.rescale!r}",
        f"w1_floor = {spec.params.w1_floor!r}",
        f"rd_floor = {spec.params.rd_floor!r}",
        f"strike_limit = {spec.params.strike_limit}",
        f"mu_cap = {spec.params.mu_cap!r}",
        "",
    ]
    lines += _density_lines("legit_density", spec.legit_density)
    lines += _density_lines("illegit_density", spec.illegit_density)
    if spec.catalog:
        lines.append("[apps]")
        for name in sorted(spec.catalog):
            lines.append(f"{name} = {spec.catalog[name]}")
        lines.append("")
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("\n".join(lines))


def _section(parser: configparser.ConfigParser, name: str, path: str):
    if not parser.has_section(name):
        raise ConfigError(f"{path}: missing [{name}] section")
    return parser[name]


def _get(section, key: str, cast, path: str):
    if key not in section:
        raise ConfigError(f"{path}: missing {key} in [{section.name}]")
    raw = section[key]
    try:
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"{path}: bad value for {key}: {raw!r}") from exc


def _enum_by_value(enum_type, raw: str, key: str, path: str):
    for member in enum_type:
        if member.value == raw:
            return member
    raise ConfigError(f"{path}: bad value for {key}: {raw!r}")


def _parse_density(section, path: str) -> DensityModel:
    bandwidth = _get(section, "bandwidth", float, path)
    raw_points = _get(section, "points", str, path)
    try:
        points = array("d", (float(p) for p in raw_points.split()))
    except ValueError as exc:
        raise ConfigError(f"{path}: bad density points in [{section.name}]") from exc
    try:
        return DensityModel(points, bandwidth)
    except Exception as exc:
        raise ConfigError(f"{path}: invalid [{section.name}]: {exc}") from exc


def read_model(path: str | os.PathLike) -> ModelSpec:
    """Parse a model file back into a validated ModelSpec."""

    spath = os.fspath(path)
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(spath, "r", encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ConfigError(f"cannot open model: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"{spath}: {exc}") from exc

    bubbles_sec = _section(parser, "bubbles", spath)
    ladder_sec = _section(parser, "ladder", spath)
    policy_sec = _section(parser, "policy", spath)
    expansion_sec = _section(parser, "expansion", spath)

    try:
        bubbles = BubbleState(
            alpha=_get(bubbles_sec, "alpha", float, spath),
            beta=_get(bubbles_sec, "beta", float, spath),
            min_gap=_get(bubbles_sec, "min_gap", float, spath),
        )
        bubbles.validate()
        ladder = PrivilegeLadder(_get(ladder_sec, "levels", int, spath))
        policy = MovementPolicy(
            mu_l=_get(policy_sec, "mu_l", float, spath),
            mu_a=_get(policy_sec, "mu_a", float, spath),
            lookback=_get(policy_sec, "lookback", int, spath),
            legit_score_action=_enum_by_value(
                LegitAction, _get(policy_sec, "legit_action", str, spath), "legit_action", spath
            ),
            illegit_score_action=_enum_by_value(
                IllegitAction,
                _get(policy_sec, "illegit_action", str, spath),
                "illegit_action",
                spath,
            ),
        )
        params = ExpansionParams(
            w2=_get(expansion_sec, "w2", float, spath),
            theta=_get(expansion_sec, "theta", float, spath),
            v0=_get(expansion_sec, "v0", float, spath),
            sigma_a=_get(expansion_sec, "sigma_a", float, spath),
            r_obs=_get(expansion_sec, "r_obs", float, spath),
            rescale=_get(expansion_sec, "rescale", float, spath),
            w1_floor=_get(expansion_sec, "w1_floor", float, spath),
            rd_floor=_get(expansion_sec, "rd_floor", float, spath),
            strike_limit=_get(expansion_sec, "strike_limit", int, spath),
            mu_cap=_get(expansion_sec, "mu_cap", float, spath),
        )
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"{spath}: invalid model: {exc}") from exc

    legit_density = _parse_density(_section(parser, "legit_density", spath), spath)
    illegit_density = _parse_density(_section(parser, "illegit_density", spath), spath)

    catalog = None
    if parser.has_section("apps"):
        catalog = {}
        for name, raw in parser["apps"].items():
            try:
                catalog[name] = int(raw)
            except ValueError as exc:
                raise ConfigError(f"{spath}: bad app level for {name!r}: {raw!r}") from exc
        try:
            validate_catalog(catalog, ladder)
        except Exception as exc:
            raise ConfigError(f"{spath}: invalid [apps]: {exc}") from exc

    return ModelSpec(
        bubbles=bubbles,
        ladder=ladder,
        policy=policy,
        params=params,
        legit_density=legit_density,
        illegit_density=illegit_density,
        catalog=catalog,
    )


def format_number(value) -> str:
    """Report formatting: six significant digits, explicit undefined marker."""

    if value is None:
        return "undefined"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return f"{value:.6g}"


_RATE_KEYS = ("acc", "prec", "tar", "trr", "far", "frr")
_COUNT_KEYS = ("ta", "tr", "fa", "fr")


@dataclass(frozen=True)
class ReportBundle:
    """Everything emit_report writes: engine counters and decisions, plus
    the baseline counters when the run had a comparator."""

    engine_counters: MetricsCounters
    decisions: list[Decision] = field(default_factory=list)
    baseline_counters: MetricsCounters | None = None


def _metrics_lines(report: MetricsReport, total: int) -> list[str]:
    lines = [f"{key} = {format_number(getattr(report, key))}" for key in _COUNT_KEYS]
    lines.append(f"total = {total}")
    lines += [f"{key} = {format_number(getattr(report, key))}" for key in _RATE_KEYS]
    return lines


def comparison_lines(
    report_a: MetricsReport,
    report_b: MetricsReport,
    label_a: str = "engine",
    label_b: str = "baseline",
) -> list[str]:
    """Rate-by-rate comparison; delta is a minus b when both are defined."""

    lines = []
    for key in _RATE_KEYS:
        a = getattr(report_a, key)
        b = getattr(report_b, key)
        delta = None if a is None or b is None else a - b
        lines.append(
            f"{key} {label_a}={format_number(a)} {label_b}={format_number(b)} "
            f"delta={format_number(delta)}"
        )
    return lines


def emit_report(bundle: ReportBundle, directory: str | os.PathLike) -> None:
    """Write metrics.txt, decisions.csv, occupancy.csv, and comparison.txt."""

    os.makedirs(directory, exist_ok=True)
    base = os.fspath(directory)
    engine_report = rates(bundle.engine_counters)

    with open(os.path.join(base, "metrics.txt"), "w", encoding="utf-8", newline="") as handle:
        handle.write("\n".join(_metrics_lines(engine_report, bundle.engine_counters.total())))
        handle.write("\n")

    with open(os.path.join(base, "decisions.csv"), "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            ("window_index", "region", "coord_after", "effective_level", "locked", "predicted")
        )
        for decision in bundle.decisions:
            writer.writerow(
                (
                    decision.window_index,
                    decision.region.value,
                    format_number(decision.coord_after),
                    decision.effective_level,
                    format_number(decision.locked),
                    decision.predicted.value,
                )
            )

    fractions = occupancy_fractions(bundle.engine_counters)
    with open(os.path.join(base, "occupancy.csv"), "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(("level", "truth", "count", "fraction"))
        for (truth, level), count in sorted(
            bundle.engine_counters.occupancy.items(), key=lambda item: (item[0][0], item[0][1])
        ):
            writer.writerow((level, truth, count, format_number(fractions[truth][level])))

    with open(os.path.join(base, "comparison.txt"), "w", encoding="utf-8", newline="") as handle:
        if bundle.baseline_counters is None:
            handle.write("baseline = absent\n")
        else:
            baseline_report = rates(bundle.baseline_counters)
            handle.write("\n".join(comparison_lines(engine_report, baseline_report)))
            handle.write("\n")


def read_metrics(path: str | os.PathLike) -> dict:
    """Parse a metrics.txt back into {key: number-or-None}."""

    spath = os.fspath(path)
    out: dict[str, float | int | None] = {}
    try:
        with open(spath, "r", encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                if "=" not in text:
                    raise ConfigError(f"{spath}: line {line_no}: expected key = value")
                key, _, raw = text.partition("=")
                key = key.strip()
                raw = raw.strip()
                if raw == "undefined":
                    out[key] = None
                else:
                    try:
                        out[key] = int(raw)
                    except ValueError:
                        try:
                            out[key] = float(raw)
                        except ValueError as exc:
                            raise ConfigError(
                                f"{spath}: line {line_no}: bad number {raw!r}"
                            ) from exc
    except OSError as exc:
        raise ConfigError(f"cannot open metrics: {exc}") from exc
    return out
