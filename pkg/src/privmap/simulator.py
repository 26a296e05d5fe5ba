"""Deterministic synthetic sessions for exercising the engine end to end.

A session plays a configurable number of fixed-length windows. Each window
draws a behavior score from the active user's model, decides whether a
password event occurs (demanded by the engine state or volunteered by the
actor), feeds the sample through the engine, and records the decision next
to a naive threshold baseline. An optional takeover hands the device to an
adversary partway through.

All randomness is derived from a session seed plus a per-draw label, so a
given scenario replays byte for byte regardless of draw order elsewhere.
"""

from __future__ import annotations

import dataclasses
import random
from dataclasses import dataclass, field
from enum import Enum

from .calibration import Region
from .engine import Decision, Engine
from .errors import ConfigError, DomainError
from .expansion import ExpansionParams
from .ladder import MovementPolicy, PrivilegeLadder
from .metrics import MetricsCounters, record
from .scores import GroundTruth, PasswordEvent, ScoreSample

__all__ = [
    "UserKind",
    "Deviation",
    "UserModel",
    "MimicSchedule",
    "Scenario",
    "BaselineDecision",
    "SessionStats",
    "SessionResult",
    "SeedStream",
    "canonical_illegit_model",
    "sample_score",
    "mimic_mix",
    "password_behavior",
    "draw_training",
    "run_session",
    "run_sessions",
    "scenario_from_config",
]


class UserKind(Enum):
    """Actor archetypes with distinct password behavior."""

    LEGIT = "legit"
    GUESSER = "guesser"
    MIMIC = "mimic"


@dataclass(frozen=True)
class Deviation:
    """A temporary (or permanent) shift in the mean behavior score."""

    start_window: int
    length: int
    mean_shift: float

    def __post_init__(self) -> None:
        if self.start_window < 0 or self.length < 1:
            raise DomainError("deviation needs start_window >= 0 and length >= 1")

    def active(self, window: int) -> bool:
        return self.start_window <= window < self.start_window + self.length


@dataclass(frozen=True)
class UserModel:
    """Generative model for one actor's behavior scores and password skill.

    Scores are Beta(beta_a, beta_b) draws plus optional Gaussian sensor
    noise, clamped to [0, 1]. Password skill depends on the kind: the
    legitimate owner answers correctly with pw_correct_prob, a guesser
    succeeds per try with guess_success_prob (default: never) unless a
    scripted guess_success_try is set, and a mimic never knows the secret.
    reinit_after_locked, when set, makes the owner fall back to the hidden
    factor after that many consecutive locked windows; adversaries cannot
    use it regardless.
    """

    kind: UserKind
    beta_a: float
    beta_b: float
    noise_sd: float = 0.0
    pw_correct_prob: float = 0.94
    deviation: Deviation | None = None
    guess_success_prob: float = 0.0
    guess_success_try: int | None = None
    max_unlock_attempts: int = 2
    reinit_after_locked: int | None = None

    def __post_init__(self) -> None:
        if not (self.beta_a > 0.0 and self.beta_b > 0.0):
            raise DomainError("Beta shape parameters must be positive")
        if self.noise_sd < 0.0:
            raise DomainError("noise_sd must be >= 0")
        if not 0.0 <= self.pw_correct_prob <= 1.0:
            raise DomainError("pw_correct_prob must lie in [0, 1]")
        if not 0.0 <= self.guess_success_prob <= 1.0:
            raise DomainError("guess_success_prob must lie in [0, 1]")
        if self.guess_success_try is not None and self.guess_success_try < 1:
            raise DomainError("guess_success_try is 1-based")
        if self.max_unlock_attempts < 0:
            raise DomainError("max_unlock_attempts must be >= 0")
        if self.reinit_after_locked is not None and self.reinit_after_locked < 1:
            raise DomainError("reinit_after_locked must be >= 1")


@dataclass(frozen=True)
class MimicSchedule:
    """Learning curve for a shoulder-surfing mimic.

    The mimic's attempt index t advances once every windows_per_attempt
    windows after takeover; each window's score comes from the owner's
    distribution with probability lambda(t) = min(1, t / t_perfect) and
    from the mimic's own distribution otherwise.
    """

    t_perfect: int = 5
    windows_per_attempt: int = 2

    def __post_init__(self) -> None:
        if self.t_perfect < 1 or self.windows_per_attempt < 1:
            raise DomainError("mimic schedule parameters must be >= 1")

    def mix_weight(self, t: int) -> float:
        if t <= 0:
            return 0.0
        return min(1.0, t / self.t_perfect)


@dataclass(frozen=True)
class Scenario:
    """Everything needed to replay one session deterministically."""

    window_count: int
    legit: UserModel
    adversary: UserModel | None = None
    takeover_window: int | None = None
    window_seconds: float = 15.0
    k_slack: int = 2
    seed: str = "0"
    baseline_threshold: float = 0.5
    level_count: int = 4
    training_samples: int = 200
    pad: float = 0.01
    min_gap: float = 0.01
    initial_coord: float = 0.0
    mimic: MimicSchedule = MimicSchedule()
    illegit_train: UserModel | None = None
    policy: MovementPolicy | None = None
    params: ExpansionParams | None = None

    def __post_init__(self) -> None:
        if self.window_count < 1:
            raise DomainError("window_count must be >= 1")
        if (self.adversary is None) != (self.takeover_window is None):
            raise DomainError("adversary and takeover_window go together")
        if self.takeover_window is not None and not (
            0 <= self.takeover_window < self.window_count
        ):
            raise DomainError("takeover_window must fall inside the session")
        if self.adversary is not None and self.adversary.kind is UserKind.LEGIT:
            raise DomainError("the adversary cannot be the legitimate owner")
        if self.window_seconds <= 0.0:
            raise DomainError("window_seconds must be positive")
        if self.k_slack < 1:
            raise DomainError("k_slack must be >= 1")
        if not 0.0 <= self.baseline_threshold <= 1.0:
            raise DomainError("baseline_threshold must lie in [0, 1]")
        if self.training_samples < 2:
            raise DomainError("training_samples must be >= 2")


@dataclass(frozen=True)
class BaselineDecision:
    """Per-window verdict of the naive threshold comparator."""

    window_index: int
    score: float
    predicted: GroundTruth
    effective_level: int
    locked: bool


@dataclass
class SessionStats:
    """Side counters a session accumulates beyond the metrics buckets."""

    prompts_total: int = 0
    adversary_prompts: int = 0
    adversary_prompts_before_lockout: int | None = None
    adversary_lock_window: int | None = None
    adversary_level1: bool = False
    baseline_adversary_legit: bool = False
    level1_by_window: int | None = None
    reinit_count: int = 0


@dataclass
class SessionResult:
    trace: list[ScoreSample]
    decisions: list[Decision]
    baseline_decisions: list[BaselineDecision]
    engine_counters: MetricsCounters
    baseline_counters: MetricsCounters
    stats: SessionStats
    engine: Engine


class SeedStream:
    """Label-addressed randomness: rng(label) is a fresh generator whose
    stream depends only on (seed, label), never on call order."""

    def __init__(self, seed: str | int) -> None:
        self.seed = str(seed)

    def rng(self, label: str) -> random.Random:
        return random.Random(f"{self.seed}/{label}")


def canonical_illegit_model() -> UserModel:
    """Stand-in population of other users, used to calibrate when the
    scenario does not name a dedicated training adversary."""

    return UserModel(kind=UserKind.GUESSER, beta_a=5.0, beta_b=2.0, noise_sd=0.05)


def _clamp01(value: float) -> float:
    return min(1.0, max(0.0, value))


def sample_score(model: UserModel, window: int, stream: SeedStream) -> float:
    """One behavior score for the given window, deterministic per
    (seed, window)."""

    rng = stream.rng(f"score/{window}")
    value = rng.betavariate(model.beta_a, model.beta_b)
    if model.deviation is not None and model.deviation.active(window):
        value += model.deviation.mean_shift
    if model.noise_sd > 0.0:
        value += rng.gauss(0.0, model.noise_sd)
    return _clamp01(value)


def mimic_mix(
    t: int,
    schedule: MimicSchedule,
    target: UserModel,
    mimic: UserModel,
    rng: random.Random,
) -> float:
    """Raw mixture draw for a mimic at attempt index t: the target's
    distribution with probability lambda(t), the mimic's own otherwise."""

    lam = schedule.mix_weight(t)
    source = target if rng.random() < lam else mimic
    return rng.betavariate(source.beta_a, source.beta_b)


def password_behavior(model: UserModel, prompt_index: int, rng: random.Random) -> PasswordEvent:
    """Outcome of the actor's prompt_index-th password entry (1-based)."""

    if prompt_index < 1:
        raise DomainError("prompt_index is 1-based")
    if model.kind is UserKind.GUESSER:
        if model.guess_success_try is not None:
            if prompt_index >= model.guess_success_try:
                return PasswordEvent.CORRECT
            return PasswordEvent.WRONG
        if model.guess_success_prob > 0.0 and rng.random() < model.guess_success_prob:
            return PasswordEvent.CORRECT
        return PasswordEvent.WRONG
    if model.kind is UserKind.MIMIC:
        return PasswordEvent.WRONG
    if rng.random() < model.pw_correct_prob:
        return PasswordEvent.CORRECT
    return PasswordEvent.WRONG


# enrollment screening: a training reading saturated at either end of the
# scale would make pure calibration impossible, so it is pulled just inside
_TRAIN_LO = 1e-9
_TRAIN_HI = 1.0 - 1e-9


def draw_training(
    model: UserModel, count: int, stream: SeedStream, label: str
) -> list[float]:
    """Historical scores for calibration: the base distribution plus sensor
    noise, no deviations (those are live-session events)."""

    rng = stream.rng(f"train/{label}")
    out: list[float] = []
    for _ in range(count):
        value = rng.betavariate(model.beta_a, model.beta_b)
        if model.noise_sd > 0.0:
            value += rng.gauss(0.0, model.noise_sd)
        out.append(min(_TRAIN_HI, max(_TRAIN_LO, value)))
    return out


def _baseline_verdict(
    window: int, score: float, threshold: float, level_count: int
) -> BaselineDecision:
    illegit = score >= threshold
    return BaselineDecision(
        window_index=window,
        score=score,
        predicted=GroundTruth.ILLEGIT if illegit else GroundTruth.LEGIT,
        effective_level=level_count if illegit else 1,
        locked=illegit,
    )


def run_session(scenario: Scenario) -> SessionResult:
    """Play every window of the scenario and return the full record."""

    sc = scenario
    stream = SeedStream(sc.seed)

    legit_train = draw_training(sc.legit, sc.training_samples, stream, "legit")
    train_model = sc.illegit_train or sc.adversary or canonical_illegit_model()
    illegit_train = draw_training(train_model, sc.training_samples, stream, "illegit")

    ladder = PrivilegeLadder(sc.level_count)
    engine = Engine.from_training(
        legit_train,
        illegit_train,
        ladder=ladder,
        pad=sc.pad,
        min_gap=sc.min_gap,
        policy=sc.policy,
        params=sc.params,
        initial_coord=sc.initial_coord,
    )

    trace: list[ScoreSample] = []
    decisions: list[Decision] = []
    baseline_decisions: list[BaselineDecision] = []
    engine_counters = MetricsCounters()
    baseline_counters = MetricsCounters()
    stats = SessionStats()

    slack_streak = 0
    locked_streak = 0
    legit_prompts = 0
    adversary_prompts = 0
    voluntary_left = sc.adversary.max_unlock_attempts if sc.adversary else 0

    for window in range(sc.window_count):
        adversary_active = (
            sc.takeover_window is not None and window >= sc.takeover_window
        )
        if adversary_active and window == sc.takeover_window:
            engine.idle_lock()
            slack_streak = 0
            locked_streak = 0
        model = sc.adversary if adversary_active else sc.legit
        assert model is not None
        truth = GroundTruth.ILLEGIT if adversary_active else GroundTruth.LEGIT

        locked = engine.locked
        exploded = engine.exploded
        event = PasswordEvent.NONE
        if not adversary_active:
            wants_reinit = exploded or (
                model.reinit_after_locked is not None
                and locked_streak >= model.reinit_after_locked
            )
            if wants_reinit:
                event = PasswordEvent.REINIT
            elif locked or slack_streak >= sc.k_slack:
                legit_prompts += 1
                event = password_behavior(
                    model, legit_prompts, stream.rng(f"pw/{window}")
                )
        elif model.kind is UserKind.GUESSER:
            if not exploded and (locked or slack_streak >= sc.k_slack):
                adversary_prompts += 1
                event = password_behavior(
                    model, adversary_prompts, stream.rng(f"pw/{window}")
                )
        elif model.kind is UserKind.MIMIC:
            if not exploded:
                if slack_streak >= sc.k_slack:
                    # a demanded prompt cannot be dodged, and the mimic
                    # does not know the secret
                    adversary_prompts += 1
                    event = PasswordEvent.WRONG
                elif locked and voluntary_left > 0:
                    voluntary_left -= 1
                    adversary_prompts += 1
                    event = PasswordEvent.WRONG
        if event is not PasswordEvent.NONE and event is not PasswordEvent.REINIT:
            slack_streak = 0
            stats.prompts_total += 1
            if adversary_active:
                stats.adversary_prompts += 1

        if adversary_active and model.kind is UserKind.MIMIC:
            assert sc.takeover_window is not None
            t = (window - sc.takeover_window) // sc.mimic.windows_per_attempt
            raw = mimic_mix(t, sc.mimic, sc.legit, model, stream.rng(f"mix/{window}"))
            if model.noise_sd > 0.0:
                raw += stream.rng(f"noise/{window}").gauss(0.0, model.noise_sd)
            score = _clamp01(raw)
        else:
            score = sample_score(model, window, stream)

        sample = ScoreSample(
            window_index=window,
            timestamp_s=window * sc.window_seconds,
            score=score,
            password_event=event,
            ground_truth=truth,
        )
        trace.append(sample)
        decision = engine.process_window(sample)
        decisions.append(decision)
        record(engine_counters, truth, decision)

        baseline = _baseline_verdict(
            window, score, sc.baseline_threshold, sc.level_count
        )
        baseline_decisions.append(baseline)
        record(baseline_counters, truth, baseline)

        if event is PasswordEvent.REINIT:
            stats.reinit_count += 1
        if decision.effective_level == 1 and stats.level1_by_window is None:
            stats.level1_by_window = window
        if adversary_active:
            if decision.effective_level == 1:
                stats.adversary_level1 = True
            if baseline.predicted is GroundTruth.LEGIT:
                stats.baseline_adversary_legit = True
            if engine.exploded and stats.adversary_lock_window is None:
                stats.adversary_lock_window = window
                stats.adversary_prompts_before_lockout = adversary_prompts

        if decision.region is Region.SLACK and event is PasswordEvent.NONE:
            slack_streak += 1
        elif decision.region is not Region.SLACK:
            slack_streak = 0
        locked_streak = locked_streak + 1 if decision.locked else 0

    if stats.adversary_prompts_before_lockout is None and sc.adversary is not None:
        stats.adversary_prompts_before_lockout = adversary_prompts

    return SessionResult(
        trace=trace,
        decisions=decisions,
        baseline_decisions=baseline_decisions,
        engine_counters=engine_counters,
        baseline_counters=baseline_counters,
        stats=stats,
        engine=engine,
    )


def run_sessions(scenario: Scenario, sessions: int) -> list[SessionResult]:
    """Replay the scenario under per-session derived seeds."""

    if sessions < 1:
        raise DomainError("sessions must be >= 1")
    results = []
    for index in range(sessions):
        derived = dataclasses.replace(scenario, seed=f"{scenario.seed}/session/{index}")
        results.append(run_session(derived))
    return results


_KINDS = {kind.value: kind for kind in UserKind}


def _model_from_section(section, kind_default: str) -> UserModel:
    kind_name = section.get("kind", kind_default)
    if kind_name not in _KINDS:
        raise ConfigError(f"unknown user kind {kind_name!r}")
    deviation = None
    if "deviation_start" in section:
        deviation = Deviation(
            start_window=section.getint("deviation_start"),
            length=section.getint("deviation_length", 1),
            mean_shift=section.getfloat("deviation_shift", 0.0),
        )
    reinit_after = section.getint("reinit_after_locked", fallback=None)
    success_try = section.getint("guess_success_try", fallback=None)
    try:
        return UserModel(
            kind=_KINDS[kind_name],
            beta_a=section.getfloat("beta_a", 2.0),
            beta_b=section.getfloat("beta_b", 5.0),
            noise_sd=section.getfloat("noise_sd", 0.0),
            pw_correct_prob=section.getfloat("pw_correct_prob", 0.94),
            deviation=deviation,
            guess_success_prob=section.getfloat("guess_success_prob", 0.0),
            guess_success_try=success_try,
            max_unlock_attempts=section.getint("max_unlock_attempts", 2),
            reinit_after_locked=reinit_after,
        )
    except (DomainError, ValueError) as exc:
        raise ConfigError(f"bad user model: {exc}") from exc


def scenario_from_config(config) -> tuple[Scenario, int]:
    """Build a Scenario from a parsed config file.

    Expects a configparser.ConfigParser with a [scenario] section and an
    optional [legit] / [adversary] pair; returns the scenario plus the
    requested session count.
    """

    if not config.has_section("scenario"):
        raise ConfigError("config needs a [scenario] section")
    top = config["scenario"]
    try:
        window_count = top.getint("windows", 200)
        sessions = top.getint("sessions", 1)
        seed = top.get("seed", "0")
    except ValueError as exc:
        raise ConfigError(f"bad scenario value: {exc}") from exc

    if config.has_section("legit"):
        legit = _model_from_section(config["legit"], "legit")
    else:
        legit = UserModel(kind=UserKind.LEGIT, beta_a=2.0, beta_b=5.0)
    if legit.kind is not UserKind.LEGIT:
        raise ConfigError("the [legit] section must describe the owner")

    adversary = None
    takeover = None
    if config.has_section("adversary"):
        adversary = _model_from_section(config["adversary"], "guesser")
        takeover = top.getint("takeover_window", fallback=None)
        if takeover is None:
            raise ConfigError("an [adversary] section needs scenario.takeover_window")

    mimic = MimicSchedule(
        t_perfect=top.getint("mimic_t_perfect", 5),
        windows_per_attempt=top.getint("mimic_windows_per_attempt", 2),
    )

    try:
        scenario = Scenario(
            window_count=window_count,
            legit=legit,
            adversary=adversary,
            takeover_window=takeover,
            window_seconds=top.getfloat("window_seconds", 15.0),
            k_slack=top.getint("k_slack", 2),
            seed=seed,
            baseline_threshold=top.getfloat("baseline_threshold", 0.5),
            level_count=top.getint("levels", 4),
            training_samples=top.getint("training_samples", 200),
            pad=top.getfloat("pad", 0.01),
            min_gap=top.getfloat("min_gap", 0.01),
            initial_coord=top.getfloat("initial_coord", 0.0),
            mimic=mimic,
        )
    except DomainError as exc:
        raise ConfigError(f"bad scenario: {exc}") from exc
    if sessions < 1:
        raise ConfigError("sessions must be >= 1")
    return scenario, sessions
