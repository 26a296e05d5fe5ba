"""Synthetic session generator: distributions, behaviors, determinism."""

from __future__ import annotations

import configparser
import dataclasses

import pytest

from privmap import (
    ConfigError,
    Deviation,
    DomainError,
    GroundTruth,
    MetricsCounters,
    MimicSchedule,
    PasswordEvent,
    Scenario,
    UserKind,
    UserModel,
    rates,
    record,
    run_session,
    run_sessions,
    scenario_from_config,
)
from privmap.simulator import (
    SeedStream,
    canonical_illegit_model,
    draw_training,
    mimic_mix,
    password_behavior,
    sample_score,
)

_OWNER = UserModel(kind=UserKind.LEGIT, beta_a=2.0, beta_b=5.0)


# --- seed streams ---


def test_seed_stream_label_addressed():
    stream = SeedStream("abc")
    first = stream.rng("x").random()
    # drawing from another label in between must not perturb the stream
    stream.rng("y").random()
    assert stream.rng("x").random() == first
    assert stream.rng("y").random() != first


def test_seed_stream_seed_types():
    assert SeedStream(7).rng("a").random() == SeedStream("7").rng("a").random()


# --- score sampling ---


def test_sample_score_beta_mean():
    stream = SeedStream("mean-check")
    draws = [sample_score(_OWNER, w, stream) for w in range(10_000)]
    assert abs(sum(draws) / len(draws) - 2.0 / 7.0) < 0.02


def test_sample_score_concentrated_beta():
    model = UserModel(kind=UserKind.LEGIT, beta_a=1e6, beta_b=1e6)
    stream = SeedStream("tight")
    draws = [sample_score(model, w, stream) for w in range(1_000)]
    assert abs(sum(draws) / len(draws) - 0.5) < 1e-3


def test_sample_score_deterministic_per_window():
    stream = SeedStream("det")
    again = SeedStream("det")
    for window in (0, 3, 99):
        assert sample_score(_OWNER, window, stream) == sample_score(
            _OWNER, window, again
        )
    assert sample_score(_OWNER, 0, stream) != sample_score(_OWNER, 1, stream)


def test_sample_score_deviation_shifts_mean():
    shifted = dataclasses.replace(
        _OWNER, deviation=Deviation(start_window=10, length=5, mean_shift=0.3)
    )
    stream = SeedStream("dev")
    for window in (10, 14):
        base = sample_score(_OWNER, window, stream)
        assert sample_score(shifted, window, stream) == pytest.approx(
            min(1.0, base + 0.3)
        )
    for window in (9, 15):
        assert sample_score(shifted, window, stream) == sample_score(
            _OWNER, window, stream
        )


def test_sample_score_clamped():
    model = UserModel(
        kind=UserKind.LEGIT,
        beta_a=2.0,
        beta_b=5.0,
        deviation=Deviation(start_window=0, length=10**9, mean_shift=5.0),
    )
    stream = SeedStream("clamp")
    assert all(sample_score(model, w, stream) == 1.0 for w in range(20))


def test_sample_score_noise_stays_in_range():
    noisy = dataclasses.replace(_OWNER, noise_sd=2.0)
    stream = SeedStream("noisy")
    assert all(0.0 <= sample_score(noisy, w, stream) <= 1.0 for w in range(500))


def test_draw_training_avoids_saturated_readings():
    noisy = dataclasses.replace(_OWNER, noise_sd=5.0)
    draws = draw_training(noisy, 400, SeedStream("sat"), "legit")
    assert len(draws) == 400
    assert all(1e-9 <= value <= 1.0 - 1e-9 for value in draws)
    assert min(draws) == 1e-9 and max(draws) == 1.0 - 1e-9


def test_draw_training_repeatable_per_label():
    a = draw_training(_OWNER, 50, SeedStream("s"), "legit")
    b = draw_training(_OWNER, 50, SeedStream("s"), "legit")
    c = draw_training(_OWNER, 50, SeedStream("s"), "illegit")
    assert a == b
    assert a != c


# --- mimic mixing ---

_TARGET_HI = UserModel(kind=UserKind.LEGIT, beta_a=9e6, beta_b=1e6)
_MIMIC_LO = UserModel(kind=UserKind.MIMIC, beta_a=1e6, beta_b=9e6)


def test_mix_weight_endpoints_and_monotone():
    schedule = MimicSchedule(t_perfect=5)
    assert schedule.mix_weight(0) == 0.0
    assert schedule.mix_weight(-3) == 0.0
    assert schedule.mix_weight(5) == 1.0
    assert schedule.mix_weight(50) == 1.0
    weights = [schedule.mix_weight(t) for t in range(8)]
    assert weights == sorted(weights)


def test_mimic_mix_pure_sources_at_extremes():
    schedule = MimicSchedule(t_perfect=5)
    rng = SeedStream("mix").rng("a")
    for _ in range(200):
        assert mimic_mix(0, schedule, _TARGET_HI, _MIMIC_LO, rng) < 0.5
    for _ in range(200):
        assert mimic_mix(5, schedule, _TARGET_HI, _MIMIC_LO, rng) > 0.5


def test_mimic_mix_interpolates_lambda():
    # lambda(2) = 0.4 with t_perfect 5: 40% of draws come from the target
    schedule = MimicSchedule(t_perfect=5)
    rng = SeedStream("mix").rng("b")
    hits = sum(
        mimic_mix(2, schedule, _TARGET_HI, _MIMIC_LO, rng) > 0.5 for _ in range(10_000)
    )
    assert abs(hits / 10_000 - 0.4) < 0.02


def test_mimic_schedule_validation():
    with pytest.raises(DomainError):
        MimicSchedule(t_perfect=0)
    with pytest.raises(DomainError):
        MimicSchedule(windows_per_attempt=0)


# --- password behavior ---


def test_password_owner_success_rate():
    stream = SeedStream("pw")
    hits = sum(
        password_behavior(_OWNER, 1, stream.rng(f"p/{i}")) is PasswordEvent.CORRECT
        for i in range(10_000)
    )
    assert abs(hits / 10_000 - 0.94) < 0.01


def test_password_guesser_scripted_success():
    model = UserModel(
        kind=UserKind.GUESSER, beta_a=5.0, beta_b=2.0, guess_success_try=3
    )
    rng = SeedStream("pw").rng("script")
    outcomes = [password_behavior(model, i, rng) for i in (1, 2, 3, 4)]
    assert outcomes == [
        PasswordEvent.WRONG,
        PasswordEvent.WRONG,
        PasswordEvent.CORRECT,
        PasswordEvent.CORRECT,
    ]


def test_password_guesser_default_never_succeeds():
    model = UserModel(kind=UserKind.GUESSER, beta_a=5.0, beta_b=2.0)
    stream = SeedStream("pw")
    assert all(
        password_behavior(model, i + 1, stream.rng(f"g/{i}")) is PasswordEvent.WRONG
        for i in range(2_000)
    )


def test_password_guesser_probabilistic_success():
    model = UserModel(
        kind=UserKind.GUESSER, beta_a=5.0, beta_b=2.0, guess_success_prob=1.0
    )
    rng = SeedStream("pw").rng("lucky")
    assert password_behavior(model, 1, rng) is PasswordEvent.CORRECT


def test_password_mimic_never_knows_secret():
    model = UserModel(kind=UserKind.MIMIC, beta_a=5.0, beta_b=2.0)
    stream = SeedStream("pw")
    assert all(
        password_behavior(model, i + 1, stream.rng(f"m/{i}")) is PasswordEvent.WRONG
        for i in range(200)
    )


def test_password_prompt_index_one_based():
    with pytest.raises(DomainError):
        password_behavior(_OWNER, 0, SeedStream("pw").rng("bad"))


# --- model validation ---


def test_user_model_rejects_bad_fields():
    with pytest.raises(DomainError):
        UserModel(kind=UserKind.LEGIT, beta_a=0.0, beta_b=5.0)
    with pytest.raises(DomainError):
        UserModel(kind=UserKind.LEGIT, beta_a=2.0, beta_b=-1.0)
    with pytest.raises(DomainError):
        UserModel(kind=UserKind.LEGIT, beta_a=2.0, beta_b=5.0, noise_sd=-0.1)
    with pytest.raises(DomainError):
        UserModel(kind=UserKind.LEGIT, beta_a=2.0, beta_b=5.0, pw_correct_prob=1.5)
    with pytest.raises(DomainError):
        UserModel(kind=UserKind.GUESSER, beta_a=2.0, beta_b=5.0, guess_success_try=0)
    with pytest.raises(DomainError):
        UserModel(kind=UserKind.LEGIT, beta_a=2.0, beta_b=5.0, reinit_after_locked=0)
    with pytest.raises(DomainError):
        UserModel(kind=UserKind.LEGIT, beta_a=2.0, beta_b=5.0, max_unlock_attempts=-1)


def test_deviation_validation():
    with pytest.raises(DomainError):
        Deviation(start_window=-1, length=3, mean_shift=0.1)
    with pytest.raises(DomainError):
        Deviation(start_window=0, length=0, mean_shift=0.1)
    dev = Deviation(start_window=4, length=2, mean_shift=0.1)
    assert not dev.active(3) and dev.active(4) and dev.active(5) and not dev.active(6)


def test_canonical_illegit_model_shape():
    model = canonical_illegit_model()
    assert model.kind is UserKind.GUESSER
    assert (model.beta_a, model.beta_b) == (5.0, 2.0)
    assert model.noise_sd == 0.05


# --- scenario validation ---


def _guesser():
    return UserModel(kind=UserKind.GUESSER, beta_a=5.0, beta_b=2.0)


def test_scenario_adversary_and_takeover_paired():
    with pytest.raises(DomainError):
        Scenario(window_count=10, legit=_OWNER, adversary=_guesser())
    with pytest.raises(DomainError):
        Scenario(window_count=10, legit=_OWNER, takeover_window=5)


def test_scenario_takeover_inside_session():
    for bad in (-1, 10, 11):
        with pytest.raises(DomainError):
            Scenario(
                window_count=10,
                legit=_OWNER,
                adversary=_guesser(),
                takeover_window=bad,
            )


def test_scenario_rejects_legit_adversary():
    with pytest.raises(DomainError):
        Scenario(window_count=10, legit=_OWNER, adversary=_OWNER, takeover_window=5)


def test_scenario_field_bounds():
    with pytest.raises(DomainError):
        Scenario(window_count=0, legit=_OWNER)
    with pytest.raises(DomainError):
        Scenario(window_count=10, legit=_OWNER, k_slack=0)
    with pytest.raises(DomainError):
        Scenario(window_count=10, legit=_OWNER, training_samples=1)
    with pytest.raises(DomainError):
        Scenario(window_count=10, legit=_OWNER, baseline_threshold=1.1)
    with pytest.raises(DomainError):
        Scenario(window_count=10, legit=_OWNER, window_seconds=0.0)


# --- full sessions ---


def _separated_scenario(seed="sep"):
    owner = UserModel(kind=UserKind.LEGIT, beta_a=2.0, beta_b=20.0, noise_sd=0.02)
    adversary = UserModel(kind=UserKind.GUESSER, beta_a=20.0, beta_b=2.0, noise_sd=0.02)
    return Scenario(
        window_count=200,
        legit=owner,
        adversary=adversary,
        takeover_window=100,
        seed=seed,
    )


def test_run_session_deterministic():
    first = run_session(_separated_scenario())
    second = run_session(_separated_scenario())
    assert first.trace == second.trace
    assert first.decisions == second.decisions
    assert first.baseline_decisions == second.baseline_decisions
    assert rates(first.engine_counters) == rates(second.engine_counters)


def test_run_session_truth_flips_at_takeover():
    result = run_session(_separated_scenario())
    for sample in result.trace:
        expected = GroundTruth.ILLEGIT if sample.window_index >= 100 else GroundTruth.LEGIT
        assert sample.ground_truth is expected
    assert [s.window_index for s in result.trace] == list(range(200))
    assert [s.timestamp_s for s in result.trace] == [w * 15.0 for w in range(200)]


def test_run_session_separated_users_near_perfect():
    result = run_session(_separated_scenario())
    engine_acc = rates(result.engine_counters).acc
    baseline_acc = rates(result.baseline_counters).acc
    assert engine_acc is not None and engine_acc >= 0.99
    assert baseline_acc is not None and baseline_acc >= 0.99


def test_run_session_counters_match_recount():
    result = run_session(_separated_scenario())
    engine_again = MetricsCounters()
    for sample, decision in zip(result.trace, result.decisions):
        record(engine_again, sample.ground_truth, decision)
    baseline_again = MetricsCounters()
    for sample, verdict in zip(result.trace, result.baseline_decisions):
        record(baseline_again, sample.ground_truth, verdict)
    assert engine_again == result.engine_counters
    assert baseline_again == result.baseline_counters


def test_run_session_stats_for_guesser():
    result = run_session(_separated_scenario())
    stats = result.stats
    assert stats.adversary_prompts_before_lockout is not None
    assert stats.adversary_lock_window is not None
    assert stats.adversary_lock_window >= 100
    assert not stats.adversary_level1
    assert stats.prompts_total >= stats.adversary_prompts


def test_run_sessions_derives_per_session_seeds():
    scenario = _separated_scenario(seed="batch")
    results = run_sessions(scenario, 3)
    assert len(results) == 3
    direct = run_session(dataclasses.replace(scenario, seed="batch/session/1"))
    assert results[1].trace == direct.trace
    assert results[0].trace != results[2].trace
    with pytest.raises(DomainError):
        run_sessions(scenario, 0)


# --- config parsing ---


def _parse(text):
    config = configparser.ConfigParser()
    config.read_string(text)
    return config


def test_scenario_from_config_round_trip():
    scenario, sessions = scenario_from_config(
        _parse(
            """
            [scenario]
            windows = 48
            sessions = 5
            seed = trial
            takeover_window = 12
            k_slack = 3
            levels = 5

            [legit]
            beta_a = 2.5
            beta_b = 6.0
            noise_sd = 0.03
            deviation_start = 5
            deviation_length = 4
            deviation_shift = 0.2

            [adversary]
            kind = mimic
            beta_a = 6.0
            beta_b = 2.5
            """
        )
    )
    assert sessions == 5
    assert scenario.window_count == 48
    assert scenario.seed == "trial"
    assert scenario.takeover_window == 12
    assert scenario.k_slack == 3
    assert scenario.level_count == 5
    assert scenario.legit.beta_a == 2.5
    assert scenario.legit.deviation == Deviation(5, 4, 0.2)
    assert scenario.adversary is not None
    assert scenario.adversary.kind is UserKind.MIMIC


def test_scenario_from_config_defaults():
    scenario, sessions = scenario_from_config(_parse("[scenario]\n"))
    assert sessions == 1
    assert scenario.window_count == 200
    assert scenario.k_slack == 2
    assert scenario.level_count == 4
    assert scenario.seed == "0"
    assert scenario.adversary is None
    assert scenario.legit.kind is UserKind.LEGIT
    assert (scenario.legit.beta_a, scenario.legit.beta_b) == (2.0, 5.0)


def test_scenario_from_config_errors():
    with pytest.raises(ConfigError):
        scenario_from_config(_parse("[legit]\nbeta_a = 2\n"))
    with pytest.raises(ConfigError):
        scenario_from_config(_parse("[scenario]\n[adversary]\nkind = guesser\n"))
    with pytest.raises(ConfigError):
        scenario_from_config(_parse("[scenario]\nwindows = many\n"))
    with pytest.raises(ConfigError):
        scenario_from_config(_parse("[scenario]\n[legit]\nkind = dragon\n"))
    with pytest.raises(ConfigError):
        scenario_from_config(_parse("[scenario]\n[legit]\nkind = guesser\n"))
    with pytest.raises(ConfigError):
        scenario_from_config(_parse("[scenario]\n[legit]\nbeta_a = -1\n"))
    with pytest.raises(ConfigError):
        scenario_from_config(_parse("[scenario]\nsessions = 0\n"))
