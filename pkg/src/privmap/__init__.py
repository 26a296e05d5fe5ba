"""Behavior-score privilege mapping.

Turns any implicit-authentication score stream into graded privilege
decisions: calibrated score bubbles, an n-level privilege ladder with
evidence-driven movement, Kalman-filtered bubble expansion fed by
password events, plus a deterministic simulator, metrics, file formats,
and a CLI.
"""

from __future__ import annotations

from ._backend import BACKEND_NAME, available_backends
from .bench import BenchResult, run_bench
from .calibration import (
    BubbleState,
    DensityModel,
    Region,
    calibrate_bubbles,
    classify_score,
    density_at,
    fit_density,
    interval_probability,
)
from .engine import Decision, Engine, ModelSpec
from .errors import (
    CalibrationError,
    ConfigError,
    DomainError,
    InputError,
    PrivmapError,
    TraceFormatError,
)
from .expansion import (
    ExpansionParams,
    ExpansionSide,
    KalmanState,
    adapt_movement_distances,
    apply_expansion,
    compute_viscosity,
    compute_w1,
    control_input,
    default_params,
    handle_password_event,
    initial_kalman_state,
    kalman_predict,
    kalman_update,
)
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
from .ladder import (
    Evidence,
    IllegitAction,
    LegitAction,
    MovementPolicy,
    PrivilegeLadder,
    apply_movement,
    default_policy,
    effective_level,
    evidence_lookup,
    permitted_categories,
    validate_catalog,
)
from .metrics import (
    MetricsCounters,
    MetricsReport,
    merge,
    occupancy_fractions,
    rates,
    record,
)
from .scores import (
    GroundTruth,
    PasswordEvent,
    PlattParams,
    ScoreSample,
    fit_platt,
    platt_transform,
    validate_score,
)
from .simulator import (
    BaselineDecision,
    Deviation,
    MimicSchedule,
    Scenario,
    SessionResult,
    SessionStats,
    UserKind,
    UserModel,
    run_session,
    run_sessions,
    scenario_from_config,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BACKEND_NAME",
    "available_backends",
    "BenchResult",
    "run_bench",
    "BubbleState",
    "DensityModel",
    "Region",
    "calibrate_bubbles",
    "classify_score",
    "density_at",
    "fit_density",
    "interval_probability",
    "Decision",
    "Engine",
    "ModelSpec",
    "CalibrationError",
    "ConfigError",
    "DomainError",
    "InputError",
    "PrivmapError",
    "TraceFormatError",
    "ExpansionParams",
    "ExpansionSide",
    "KalmanState",
    "adapt_movement_distances",
    "apply_expansion",
    "compute_viscosity",
    "compute_w1",
    "control_input",
    "default_params",
    "handle_password_event",
    "initial_kalman_state",
    "kalman_predict",
    "kalman_update",
    "ReportBundle",
    "comparison_lines",
    "emit_report",
    "format_number",
    "parse_trace",
    "read_metrics",
    "read_model",
    "write_model",
    "write_trace",
    "Evidence",
    "IllegitAction",
    "LegitAction",
    "MovementPolicy",
    "PrivilegeLadder",
    "apply_movement",
    "default_policy",
    "effective_level",
    "evidence_lookup",
    "permitted_categories",
    "validate_catalog",
    "MetricsCounters",
    "MetricsReport",
    "merge",
    "occupancy_fractions",
    "rates",
    "record",
    "GroundTruth",
    "PasswordEvent",
    "PlattParams",
    "ScoreSample",
    "fit_platt",
    "platt_transform",
    "validate_score",
    "BaselineDecision",
    "Deviation",
    "MimicSchedule",
    "Scenario",
    "SessionResult",
    "SessionStats",
    "UserKind",
    "UserModel",
    "run_session",
    "run_sessions",
    "scenario_from_config",
]
