"""Initial score-space calibration: bubble boundaries and density models.

Training scores from the two populations place the boundaries alpha and
beta so that [0, alpha] holds only unambiguously legitimate scores and
[beta, 1] only unambiguously illegitimate ones, with a guaranteed gap
between them. Kernel density models of both populations feed the
expansion and adaptive-movement machinery.
"""

from __future__ import annotations

import math
import statistics
from array import array
from dataclasses import dataclass, field
from enum import Enum

from . import _backend
from .errors import CalibrationError, DomainError
from .scores import validate_score


class Region(Enum):
    """Which bubble a score falls in."""

    LEGIT = "legit"
    SLACK = "slack"
    ILLEGIT = "illegit"


@dataclass
class BubbleState:
    """Mutable geometry of the three bubbles plus event counters.

    alpha and beta never collide: alpha <= beta - min_gap always holds.
    n_l / n_a count correct / wrong password inputs that landed in the
    slack bubble; n_cycles counts every processed window.
    """

    alpha: float
    beta: float
    min_gap: float = 0.01
    exploded: bool = False
    n_l: int = 0
    n_a: int = 0
    n_cycles: int = 0

    def validate(self) -> None:
        if not (self.min_gap > 0):
            raise DomainError(f"min_gap must be positive, got {self.min_gap}")
        if not (0.0 <= self.alpha <= self.beta - self.min_gap <= 1.0 - self.min_gap):
            raise DomainError(
                f"bubble boundaries out of order: alpha={self.alpha!r} beta={self.beta!r} "
                f"min_gap={self.min_gap!r}"
            )
        if self.exploded and self.alpha != 0.0:
            raise DomainError("exploded state requires alpha = 0")
        if self.n_l < 0 or self.n_a < 0 or self.n_cycles < 0:
            raise DomainError("counters must be non-negative")
        if self.n_l + self.n_a > self.n_cycles:
            raise DomainError("password events cannot outnumber cycles")

    def copy(self) -> "BubbleState":
        return BubbleState(
            alpha=self.alpha,
            beta=self.beta,
            min_gap=self.min_gap,
            exploded=self.exploded,
            n_l=self.n_l,
            n_a=self.n_a,
            n_cycles=self.n_cycles,
        )


def calibrate_bubbles(
    legit_scores,
    illegit_scores,
    pad: float = 0.01,
    min_gap: float = 0.01,
) -> BubbleState:
    """Place alpha and beta from training scores of both populations.

    Boundary rule: alpha = min(max legit, min illegit - pad) and
    beta = max(min illegit, max legit + pad), clamped into [0, 1], then
    alpha pulled down to keep the gap. Purity is enforced on top of the
    rule: no illegitimate training score may sit inside [0, alpha] and no
    legitimate one inside [beta, 1], nudging a boundary by one ulp when
    the raw rule lands exactly on an opposing score.
    """
    if pad < 0:
        raise DomainError(f"pad must be non-negative, got {pad}")
    if min_gap <= 0:
        raise DomainError(f"min_gap must be positive, got {min_gap}")
    legit = [validate_score(s) for s in legit_scores]
    illegit = [validate_score(s) for s in illegit_scores]
    if not legit or not illegit:
        raise CalibrationError("single-class training data: need scores from both populations")

    max_l = max(legit)
    min_i = min(illegit)
    if min_i <= 0.0:
        # [0, alpha] always contains 0, so an illegitimate score there is fatal
        raise CalibrationError("degenerate training data: illegitimate score at 0.0")
    if max_l >= 1.0:
        raise CalibrationError("degenerate training data: legitimate score at 1.0")

    alpha = max(0.0, min(max_l, min_i - pad))
    beta = min(1.0, max(min_i, max_l + pad))
    if alpha >= min_i:
        alpha = math.nextafter(min_i, -math.inf)
    if beta <= max_l:
        beta = math.nextafter(max_l, math.inf)
    if beta - min_gap < 0:
        raise CalibrationError("degenerate training data: no room for the legitimate bubble")
    alpha = min(alpha, beta - min_gap)

    state = BubbleState(alpha=alpha, beta=beta, min_gap=min_gap)
    state.validate()
    return state


def classify_score(score: float, bubbles: BubbleState) -> Region:
    """Region of a score; boundaries belong to their bubbles.

    An exploded state classifies everything as illegitimate until
    re-initialization.
    """
    if bubbles.exploded:
        return Region.ILLEGIT
    if score <= bubbles.alpha:
        return Region.LEGIT
    if score >= bubbles.beta:
        return Region.ILLEGIT
    return Region.SLACK


@dataclass(frozen=True)
class DensityModel:
    """Gaussian-kernel density over training scores.

    Points are kept sorted in a C-double array so the compiled kernels can
    walk them without conversion.
    """

    sample_points: array = field(repr=False)
    bandwidth: float = 0.0

    def __post_init__(self):
        pts = array("d", sorted(validate_score(p) for p in self.sample_points))
        if len(pts) < 2:
            raise CalibrationError("density model needs at least 2 samples")
        if not (self.bandwidth > 0 and math.isfinite(self.bandwidth)):
            raise DomainError(f"bandwidth must be positive and finite, got {self.bandwidth}")
        object.__setattr__(self, "sample_points", pts)

    def __len__(self) -> int:
        return len(self.sample_points)


_BANDWIDTH_FLOOR = 1e-3


def fit_density(samples) -> DensityModel:
    """Fit a Gaussian KDE with the Silverman rule-of-thumb bandwidth.

    h = 0.9 * min(sd, IQR/1.34) * n^(-1/5), floored at 1e-3 so identical
    samples still produce a usable model.
    """
    pts = [validate_score(s) for s in samples]
    if len(pts) < 2:
        raise CalibrationError("density model needs at least 2 samples")
    sd = statistics.pstdev(pts)
    q1, _, q3 = statistics.quantiles(pts, n=4, method="inclusive")
    spread = min(sd, (q3 - q1) / 1.34)
    h = 0.9 * spread * len(pts) ** (-0.2)
    return DensityModel(array("d", pts), max(h, _BANDWIDTH_FLOOR))


def density_at(model: DensityModel, x: float) -> float:
    """Density estimate p(x)."""
    return _backend.gaussian_density_at(model.sample_points, model.bandwidth, x)


def interval_probability(model: DensityModel, lo: float, hi: float) -> float:
    """Kernel mass over [lo, hi], evaluated analytically via the Gaussian CDF."""
    if lo > hi:
        raise DomainError(f"empty interval: lo={lo} > hi={hi}")
    return _backend.gaussian_interval_mass(model.sample_points, model.bandwidth, lo, hi)
