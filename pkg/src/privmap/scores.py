"""Behavior-score domain: validated scores, sample records, sigmoid normalization.

Scores live in [0, 1] with low values meaning legitimate. Raw classifier
outputs of any scale are brought into that range with a two-parameter
sigmoid, fitted here by cross-entropy minimization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import CalibrationError, DomainError, InputError


class PasswordEvent(Enum):
    """Second-factor verdict attached to a window, if any."""

    NONE = "none"
    CORRECT = "correct"
    WRONG = "wrong"
    REINIT = "reinit"


class GroundTruth(Enum):
    """Who actually generated a window's behavior data."""

    LEGIT = "legit"
    ILLEGIT = "illegit"


def validate_score(value: float) -> float:
    """Return value if it is a finite real in [0, 1], else raise DomainError.

    Out-of-range scores are rejected rather than clamped so upstream faults
    stay visible.
    """
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise DomainError(f"behavior score must be a real number, got {value!r}")
    value = float(value)
    if math.isnan(value) or not (0.0 <= value <= 1.0):
        raise DomainError(f"behavior score must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class ScoreSample:
    """One authentication cycle: a score plus optional event and truth label."""

    window_index: int
    timestamp_s: float
    score: float
    password_event: PasswordEvent = PasswordEvent.NONE
    ground_truth: GroundTruth | None = None

    def __post_init__(self):
        if self.window_index < 0:
            raise InputError(f"window_index must be non-negative, got {self.window_index}")
        if self.timestamp_s < 0:
            raise InputError(f"timestamp_s must be non-negative, got {self.timestamp_s}")
        validate_score(self.score)


@dataclass(frozen=True)
class PlattParams:
    """Sigmoid coefficients: score = 1 / (1 + exp(a_coeff * raw + b_coeff))."""

    a_coeff: float
    b_coeff: float

    def __post_init__(self):
        if not (math.isfinite(self.a_coeff) and math.isfinite(self.b_coeff)):
            raise DomainError("sigmoid coefficients must be finite")


def _sigmoid(t: float) -> float:
    """1 / (1 + exp(t)), evaluated without overflow. Decreasing in t."""
    if t >= 0:
        e = math.exp(-min(t, 700.0))
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(max(t, -700.0)))


def platt_transform(raw: float, params: PlattParams) -> float:
    """Map a raw decision value into [0, 1] via the fitted sigmoid."""
    if not math.isfinite(raw):
        raise DomainError(f"raw decision value must be finite, got {raw!r}")
    out = _sigmoid(params.a_coeff * raw + params.b_coeff)
    # mathematically inside [0, 1]; guard only against rounding
    return min(1.0, max(0.0, out))


def _cross_entropy(pairs: list[tuple[float, int]], a: float, b: float) -> float:
    """Mean cross-entropy of the sigmoid against 0/1 targets (1 = Illegit).

    For target 1, -log(score) = log1p(exp(t)); for target 0,
    -log(1 - score) = log1p(exp(-t)), with t = a*raw + b.
    """
    total = 0.0
    for raw, target in pairs:
        t = a * raw + b
        if target == 1:
            total += math.log1p(math.exp(t)) if t < 36 else t
        else:
            total += math.log1p(math.exp(-t)) if t > -36 else -t
    return total / len(pairs)


def fit_platt(pairs: list[tuple[float, GroundTruth]]) -> PlattParams:
    """Fit sigmoid coefficients by cross-entropy with Legit mapped toward 0.

    Damped Newton iteration with a ridge safeguard, a trust-region cap on
    the step, and backtracking. Requires at least one sample per class.
    For the usual orientation (legit raws below illegit raws) the fitted
    a_coeff is negative, making the score increase with raw.
    """
    coded: list[tuple[float, int]] = []
    n_pos = n_neg = 0
    for raw, label in pairs:
        if not math.isfinite(raw):
            raise DomainError(f"raw decision value must be finite, got {raw!r}")
        target = 1 if label is GroundTruth.ILLEGIT else 0
        n_pos += target
        n_neg += 1 - target
        coded.append((float(raw), target))
    if n_pos == 0 or n_neg == 0:
        raise CalibrationError("single-class training data: need both Legit and Illegit raws")

    a, b = -1.0, 0.0
    loss = _cross_entropy(coded, a, b)
    n = len(coded)
    for _ in range(300):
        # score = sigmoid(t) decreases in t, so dCE/dt = target - score
        ga = gb = 0.0
        haa = hab = hbb = 0.0
        for raw, target in coded:
            s = _sigmoid(a * raw + b)
            d = target - s
            w = max(s * (1.0 - s), 1e-12)
            ga += d * raw
            gb += d
            haa += w * raw * raw
            hab += w * raw
            hbb += w
        ga /= n
        gb /= n
        haa /= n
        hab /= n
        hbb /= n
        if math.hypot(ga, gb) < 1e-10:
            break
        ridge = 1e-9
        det = (haa + ridge) * (hbb + ridge) - hab * hab
        if det > 0:
            da = -((hbb + ridge) * ga - hab * gb) / det
            db = -((haa + ridge) * gb - hab * ga) / det
        else:
            da, db = -ga, -gb
        # trust region: separable data drives |a| to infinity in huge leaps
        norm = math.hypot(da, db)
        if norm > 5.0:
            da *= 5.0 / norm
            db *= 5.0 / norm
        step = 1.0
        improved = False
        for _ in range(40):
            na = min(max(a + step * da, -1e3), 1e3)
            nb = min(max(b + step * db, -1e3), 1e3)
            new_loss = _cross_entropy(coded, na, nb)
            if new_loss < loss:
                a, b, loss = na, nb, new_loss
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return PlattParams(a, b)
