"""Privilege ladder: n ordered levels on a continuous [0, 1] coordinate.

Coordinate 0 is the top level (full access), 1 the bottom (locked).
Movement steps the coordinate up by mu_l on legitimate evidence and down
by mu_a on illegitimate evidence; a position between two anchors grants
the privileges of the lower neighbor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .calibration import Region
from .errors import ConfigError, DomainError


@dataclass(frozen=True)
class PrivilegeLadder:
    level_count: int

    def __post_init__(self):
        if not isinstance(self.level_count, int) or self.level_count < 3:
            raise DomainError(
                f"a ladder needs at least 3 levels (top, observation, locked), got {self.level_count!r}"
            )

    @property
    def spacing(self) -> float:
        return 1.0 / (self.level_count - 1)


class Evidence(Enum):
    LEGIT = "legit"
    ILLEGIT = "illegit"
    NONE = "none"


class LegitAction(Enum):
    """Response to a score inside the legitimate bubble."""

    JUMP_TO_TOP = "jump_to_top"
    STEP_UP = "step_up"


class IllegitAction(Enum):
    """Response to a score inside the illegitimate bubble."""

    LOCK_IMMEDIATELY = "lock_immediately"
    STEP_DOWN = "step_down"


@dataclass(frozen=True)
class MovementPolicy:
    mu_l: float
    mu_a: float
    lookback: int = 12
    legit_score_action: LegitAction = LegitAction.STEP_UP
    illegit_score_action: IllegitAction = IllegitAction.LOCK_IMMEDIATELY

    def __post_init__(self):
        if not (0.0 < self.mu_l <= 1.0):
            raise DomainError(f"mu_l must be in (0, 1], got {self.mu_l}")
        if not (0.0 < self.mu_a <= 1.0):
            raise DomainError(f"mu_a must be in (0, 1], got {self.mu_a}")
        if self.lookback < 1:
            raise DomainError(f"lookback must be at least 1, got {self.lookback}")


def default_policy(ladder: PrivilegeLadder) -> MovementPolicy:
    """Default steps: half a level up, a full level down."""
    return MovementPolicy(mu_l=ladder.spacing / 2.0, mu_a=ladder.spacing)


_ANCHOR_EPS = 1e-9


def effective_level(coord: float, ladder: PrivilegeLadder) -> int:
    """Level index granted at a coordinate, in 1..n.

    A coordinate between anchors yields the lower-privilege neighbor. The
    snap tolerance absorbs accumulated float error in repeated mu steps so
    a position meant to sit on an anchor is not demoted a whole level.
    """
    if coord <= 0.0:
        return 1
    ratio = coord / ladder.spacing
    nearest = round(ratio)
    if abs(ratio - nearest) < _ANCHOR_EPS:
        level = int(nearest) + 1
    else:
        level = math.ceil(ratio) + 1
    return min(max(level, 1), ladder.level_count)


def evidence_lookup(history, lookback: int) -> Evidence:
    """Evidence from the most recent lookback regions; illegitimate wins."""
    recent = list(history)[-lookback:]
    if Region.ILLEGIT in recent:
        return Evidence.ILLEGIT
    if Region.LEGIT in recent:
        return Evidence.LEGIT
    return Evidence.NONE


def apply_movement(
    coord: float,
    region: Region,
    evidence: Evidence,
    policy: MovementPolicy,
    ladder: PrivilegeLadder,
) -> float:
    """One movement step; the result never leaves [0, 1]."""
    if region is Region.LEGIT:
        if policy.legit_score_action is LegitAction.JUMP_TO_TOP:
            return 0.0
        return max(0.0, coord - policy.mu_l)
    if region is Region.ILLEGIT:
        if policy.illegit_score_action is IllegitAction.LOCK_IMMEDIATELY:
            return 1.0
        return min(1.0, coord + policy.mu_a)
    if evidence is Evidence.LEGIT:
        return max(0.0, coord - policy.mu_l)
    if evidence is Evidence.ILLEGIT:
        return min(1.0, coord + policy.mu_a)
    return coord


def validate_catalog(catalog: dict, ladder: PrivilegeLadder) -> dict:
    """Check an app-category map; level n grants nothing, so indices stop at n-1."""
    for name, level in catalog.items():
        if not isinstance(level, int) or not (1 <= level <= ladder.level_count - 1):
            raise ConfigError(
                f"app category {name!r} maps to level {level!r}; must be an integer in "
                f"1..{ladder.level_count - 1}"
            )
    return dict(catalog)


def permitted_categories(level: int, catalog: dict) -> set:
    """Categories reachable from a level: everything mapped at or below it."""
    return {name for name, idx in catalog.items() if idx >= level}
