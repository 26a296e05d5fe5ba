"""Bubble expansion: password feedback drives boundary growth through a
physical acceleration model smoothed by a Kalman filter.

A correct password on a slack-resident score accelerates the legitimate
boundary toward the score; a wrong password accelerates the illegitimate
boundary the other way. Acceleration feeds a 2-state (position, velocity)
constant-velocity filter per side; the filtered position, rescaled, is the
applied expansion. Opposing-population density inside a bubble acts as
viscosity and can stop legitimate-side expansion entirely. Three
consecutive wrong passwords explode the legitimate bubble.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from . import _backend
from .calibration import BubbleState, DensityModel, Region, classify_score, interval_probability
from .errors import DomainError, InputError
from .ladder import MovementPolicy
from .scores import PasswordEvent


@dataclass(frozen=True)
class ExpansionParams:
    """Physics and filter constants.

    rd_floor keeps the wrong-password division finite when the position
    sits at the top of the ladder (distance 0); its natural value is half
    the ladder spacing.
    """

    w2: float = 0.01
    theta: float = 0.01
    v0: float = 0.0
    sigma_a: float = 0.1
    r_obs: float = 0.05
    rescale: float = 0.1
    w1_floor: float = 0.01
    rd_floor: float = 0.25
    strike_limit: int = 3
    mu_cap: float = 1.0

    def __post_init__(self):
        if self.w2 < 0:
            raise DomainError(f"w2 must be non-negative, got {self.w2}")
        if not (0.0 <= self.theta < 1.0):
            raise DomainError(f"theta must be in [0, 1), got {self.theta}")
        if self.v0 < 0:
            raise DomainError(f"v0 must be non-negative, got {self.v0}")
        for name in ("sigma_a", "r_obs", "rescale", "w1_floor", "rd_floor"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        if self.strike_limit < 1:
            raise DomainError(f"strike_limit must be at least 1, got {self.strike_limit}")
        if not (0.0 < self.mu_cap <= 1.0):
            raise DomainError(f"mu_cap must be in (0, 1], got {self.mu_cap}")


def default_params(ladder) -> ExpansionParams:
    """Defaults with rd_floor tied to the ladder geometry (half a spacing)."""
    return ExpansionParams(rd_floor=ladder.spacing / 2.0)


class ExpansionSide(Enum):
    LEGIT = "legit"
    ILLEGIT = "illegit"


@dataclass(frozen=True)
class KalmanState:
    """2-state estimate: x = [expansion position, velocity], P its covariance."""

    x0: float = 0.0
    x1: float = 0.0
    p00: float = 1.0
    p01: float = 0.0
    p10: float = 0.0
    p11: float = 1.0

    @property
    def x(self) -> tuple[float, float]:
        return (self.x0, self.x1)

    @property
    def p_cov(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return ((self.p00, self.p01), (self.p10, self.p11))


def initial_kalman_state(params: ExpansionParams) -> KalmanState:
    """Zero position, configured initial velocity, unit covariance."""
    return KalmanState(x0=0.0, x1=params.v0)


def compute_w1(bubbles: BubbleState, params: ExpansionParams) -> float:
    """Password-event rate (n_l + n_a) / N, floored to stay usable at startup."""
    rate = (bubbles.n_l + bubbles.n_a) / max(1, bubbles.n_cycles)
    return max(params.w1_floor, rate)


def compute_viscosity(
    adverse_density: DensityModel,
    bubbles: BubbleState,
    side: ExpansionSide,
    params: ExpansionParams,
) -> float:
    """Damping from opposing-population mass already inside the bubble.

    The density must be the opposing population's: illegitimate scores for
    the legitimate side and vice versa. Zero means expansion is halted.
    """
    if side is ExpansionSide.LEGIT:
        mass = interval_probability(adverse_density, 0.0, bubbles.alpha)
    else:
        mass = interval_probability(adverse_density, bubbles.beta, 1.0)
    return max(0.0, 1.0 - mass - params.theta)


def control_input(
    event: PasswordEvent,
    score: float,
    bubbles: BubbleState,
    coord: float,
    v: float,
    params: ExpansionParams,
) -> tuple[float, ExpansionSide]:
    """Acceleration injected into the filter for one password event.

    Correct: u = (R_d * (score - alpha) / W1 + W2) * V toward the
    legitimate side. Wrong: u = (beta - score) / (R_d * W1) + W2 toward
    the illegitimate side; note the wrong-password input is not damped by
    viscosity, only the collision clamp bounds it. Distances floor at 0.
    """
    rd = max(params.rd_floor, coord)
    w1 = compute_w1(bubbles, params)
    if event is PasswordEvent.CORRECT:
        eps = max(0.0, score - bubbles.alpha)
        return (rd * eps / w1 + params.w2) * v, ExpansionSide.LEGIT
    if event is PasswordEvent.WRONG:
        eps_l = max(0.0, bubbles.beta - score)
        return eps_l / (rd * w1) + params.w2, ExpansionSide.ILLEGIT
    raise InputError(f"control input requires a Correct or Wrong event, got {event}")


def kalman_predict(state: KalmanState, u: float, t: float, params: ExpansionParams) -> KalmanState:
    """Advance the constant-velocity model by t with acceleration input u."""
    if not t > 0:
        raise DomainError(f"prediction interval must be positive, got {t}")
    out = _backend.kalman_predict_step(
        state.x0, state.x1, state.p00, state.p01, state.p10, state.p11, u, t, params.sigma_a
    )
    return KalmanState(*out)


def kalman_update(state: KalmanState, z: float, params: ExpansionParams) -> tuple[KalmanState, float]:
    """Fold in a position measurement; return the state and the expansion.

    The applied expansion is rescale * max(0, posterior position):
    the filter may estimate a negative position early on, which must not
    shrink a bubble.
    """
    try:
        out = _backend.kalman_update_step(
            state.x0, state.x1, state.p00, state.p01, state.p10, state.p11, z, params.r_obs
        )
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    new_state = KalmanState(*out)
    return new_state, params.rescale * max(0.0, new_state.x0)


def apply_expansion(bubbles: BubbleState, s: float, side: ExpansionSide) -> None:
    """Grow one boundary by s, in place, honoring the collision gap.

    While exploded the legitimate boundary is pinned at 0; only
    re-initialization restores it.
    """
    if s < 0:
        raise DomainError(f"expansion must be non-negative, got {s}")
    if side is ExpansionSide.LEGIT:
        if bubbles.exploded:
            return
        bubbles.alpha = min(bubbles.alpha + s, bubbles.beta - bubbles.min_gap)
    else:
        bubbles.beta = max(bubbles.beta - s, bubbles.alpha + bubbles.min_gap, bubbles.min_gap)


def handle_password_event(
    bubbles: BubbleState,
    kalman_legit: KalmanState,
    kalman_illegit: KalmanState,
    event: PasswordEvent,
    score: float,
    coord: float,
    legit_density: DensityModel,
    illegit_density: DensityModel,
    params: ExpansionParams,
    wrong_streak: int,
) -> tuple[KalmanState, KalmanState, int]:
    """Run one password event through the expansion pipeline.

    Mutates bubbles (counters, boundaries, explosion flag) and returns the
    two filter states plus the new consecutive-wrong count. Events with
    zero control input never enter the filter, so a fully viscous bubble
    stays exactly still. Cycle counting is the caller's job.
    """
    if event is PasswordEvent.CORRECT:
        if not bubbles.exploded and classify_score(score, bubbles) is Region.SLACK:
            bubbles.n_l += 1
            v = compute_viscosity(illegit_density, bubbles, ExpansionSide.LEGIT, params)
            u, side = control_input(event, score, bubbles, coord, v, params)
            if u > 0.0:
                z = max(0.0, score - bubbles.alpha)
                kalman_legit = kalman_predict(kalman_legit, u, 1.0, params)
                kalman_legit, s = kalman_update(kalman_legit, z, params)
                apply_expansion(bubbles, s, side)
        return kalman_legit, kalman_illegit, 0

    if event is PasswordEvent.WRONG:
        if not bubbles.exploded and classify_score(score, bubbles) is Region.SLACK:
            bubbles.n_a += 1
        u, side = control_input(event, score, bubbles, coord, 1.0, params)
        if u > 0.0:
            z = max(0.0, bubbles.beta - score)
            kalman_illegit = kalman_predict(kalman_illegit, u, 1.0, params)
            kalman_illegit, s = kalman_update(kalman_illegit, z, params)
            apply_expansion(bubbles, s, side)
        streak = wrong_streak + 1
        if streak >= params.strike_limit:
            bubbles.exploded = True
            bubbles.alpha = 0.0
        return kalman_legit, kalman_illegit, streak

    raise InputError(f"expansion handles Correct and Wrong events only, got {event}")


_DENOM_FLOOR = 1e-6
_MU_FLOOR = 1e-9


def adapt_movement_distances(
    policy: MovementPolicy,
    legit_density: DensityModel,
    illegit_density: DensityModel,
    bubbles: BubbleState,
    params: ExpansionParams,
) -> MovementPolicy:
    """Rescale movement steps by who dominates each bubble.

    mu_l scales by legitimate over illegitimate mass inside [0, alpha];
    mu_a by illegitimate over legitimate mass inside [beta, 1].
    Denominators floor at 1e-6 and results clamp into (0, mu_cap].
    """
    legit_low = interval_probability(legit_density, 0.0, bubbles.alpha)
    illegit_low = interval_probability(illegit_density, 0.0, bubbles.alpha)
    legit_high = interval_probability(legit_density, bubbles.beta, 1.0)
    illegit_high = interval_probability(illegit_density, bubbles.beta, 1.0)
    mu_l = policy.mu_l * (legit_low / max(illegit_low, _DENOM_FLOOR))
    mu_a = policy.mu_a * (illegit_high / max(legit_high, _DENOM_FLOOR))
    mu_l = min(params.mu_cap, max(mu_l, _MU_FLOOR))
    mu_a = min(params.mu_cap, max(mu_a, _MU_FLOOR))
    return replace(policy, mu_l=mu_l, mu_a=mu_a)
