"""Per-window orchestration: classify, gather evidence, move, expand, decide.

An Engine owns all mutable session state. Every window follows the same
sequence: count the cycle, classify the score against the current
bubbles, look up movement evidence, step the ladder position, fold in any
password event (expansion plus movement-step adaptation, or the full
re-initialization path), record the region, and emit a Decision. The
transition is deterministic: the same state and sample always produce the
same outputs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .calibration import (
    BubbleState,
    DensityModel,
    Region,
    calibrate_bubbles,
    classify_score,
    fit_density,
)
from .errors import DomainError, InputError
from .expansion import (
    ExpansionParams,
    KalmanState,
    adapt_movement_distances,
    default_params,
    handle_password_event,
    initial_kalman_state,
)
from .ladder import (
    MovementPolicy,
    PrivilegeLadder,
    apply_movement,
    default_policy,
    effective_level,
    evidence_lookup,
)
from .scores import GroundTruth, PasswordEvent, ScoreSample


@dataclass(frozen=True)
class Decision:
    """One window's outcome. locked holds exactly when the level is the bottom one."""

    window_index: int
    region: Region
    coord_after: float
    effective_level: int
    locked: bool
    predicted: GroundTruth


@dataclass(frozen=True)
class ModelSpec:
    """Everything needed to reconstruct a fresh engine; the serialized form."""

    bubbles: BubbleState
    ladder: PrivilegeLadder
    policy: MovementPolicy
    params: ExpansionParams
    legit_density: DensityModel
    illegit_density: DensityModel
    catalog: dict | None = None


class Engine:
    """Session state machine over calibrated bubbles and a privilege ladder."""

    def __init__(
        self,
        bubbles: BubbleState,
        ladder: PrivilegeLadder,
        policy: MovementPolicy,
        legit_density: DensityModel,
        illegit_density: DensityModel,
        params: ExpansionParams,
        initial_coord: float = 0.0,
    ):
        bubbles.validate()
        if not (0.0 <= initial_coord <= 1.0):
            raise DomainError(f"initial coordinate must be in [0, 1], got {initial_coord}")
        self.bubbles = bubbles.copy()
        self.ladder = ladder
        self.params = params
        self.legit_density = legit_density
        self.illegit_density = illegit_density
        self.coord = float(initial_coord)
        self.kalman_legit = initial_kalman_state(params)
        self.kalman_illegit = initial_kalman_state(params)
        self.wrong_streak = 0
        self.policy = policy
        self.history: deque = deque(maxlen=policy.lookback)
        # pristine copies for the re-initialization path
        self._snapshot_bubbles = bubbles.copy()
        self._snapshot_policy = policy
        self._last_window: int | None = None

    @classmethod
    def from_training(
        cls,
        legit_scores,
        illegit_scores,
        ladder: PrivilegeLadder | None = None,
        pad: float = 0.01,
        min_gap: float = 0.01,
        policy: MovementPolicy | None = None,
        params: ExpansionParams | None = None,
        initial_coord: float = 0.0,
    ) -> "Engine":
        """Calibrate bubbles and densities from training scores and build an engine."""
        ladder = ladder or PrivilegeLadder(4)
        bubbles = calibrate_bubbles(legit_scores, illegit_scores, pad=pad, min_gap=min_gap)
        return cls(
            bubbles=bubbles,
            ladder=ladder,
            policy=policy or default_policy(ladder),
            legit_density=fit_density(legit_scores),
            illegit_density=fit_density(illegit_scores),
            params=params or default_params(ladder),
            initial_coord=initial_coord,
        )

    @classmethod
    def from_model(cls, spec: ModelSpec, initial_coord: float = 0.0) -> "Engine":
        return cls(
            bubbles=spec.bubbles,
            ladder=spec.ladder,
            policy=spec.policy,
            legit_density=spec.legit_density,
            illegit_density=spec.illegit_density,
            params=spec.params,
            initial_coord=initial_coord,
        )

    def model_spec(self, catalog: dict | None = None) -> ModelSpec:
        """Pristine model bundle (calibration-time state, not live state)."""
        return ModelSpec(
            bubbles=self._snapshot_bubbles.copy(),
            ladder=self.ladder,
            policy=self._snapshot_policy,
            params=self.params,
            legit_density=self.legit_density,
            illegit_density=self.illegit_density,
            catalog=catalog,
        )

    @property
    def locked(self) -> bool:
        return effective_level(self.coord, self.ladder) == self.ladder.level_count

    @property
    def exploded(self) -> bool:
        return self.bubbles.exploded

    def process_window(self, sample: ScoreSample) -> Decision:
        """Advance one authentication cycle and decide."""
        if not isinstance(sample, ScoreSample):
            raise InputError(f"expected a ScoreSample, got {type(sample).__name__}")
        if self._last_window is not None and sample.window_index <= self._last_window:
            raise InputError(
                f"window_index must increase: {sample.window_index} after {self._last_window}"
            )
        self._last_window = sample.window_index

        self.bubbles.n_cycles += 1
        region = classify_score(sample.score, self.bubbles)
        evidence = evidence_lookup(self.history, self.policy.lookback)
        self.coord = apply_movement(self.coord, region, evidence, self.policy, self.ladder)

        event = sample.password_event
        if event is PasswordEvent.CORRECT or event is PasswordEvent.WRONG:
            self.kalman_legit, self.kalman_illegit, self.wrong_streak = handle_password_event(
                self.bubbles,
                self.kalman_legit,
                self.kalman_illegit,
                event,
                sample.score,
                self.coord,
                self.legit_density,
                self.illegit_density,
                self.params,
                self.wrong_streak,
            )
            # adaptation always restarts from the calibrated policy: the
            # density ratios are absolute, not incremental
            self.policy = adapt_movement_distances(
                self._snapshot_policy,
                self.legit_density,
                self.illegit_density,
                self.bubbles,
                self.params,
            )
        elif event is PasswordEvent.REINIT:
            self.reinitialize()

        self.history.append(region)
        level = effective_level(self.coord, self.ladder)
        locked = level == self.ladder.level_count
        return Decision(
            window_index=sample.window_index,
            region=region,
            coord_after=self.coord,
            effective_level=level,
            locked=locked,
            predicted=GroundTruth.ILLEGIT if locked else GroundTruth.LEGIT,
        )

    def reinitialize(self) -> None:
        """Hidden-factor reset: restore calibrated geometry, full trust, clean history."""
        self.bubbles = self._snapshot_bubbles.copy()
        self.policy = self._snapshot_policy
        self.kalman_legit = initial_kalman_state(self.params)
        self.kalman_illegit = initial_kalman_state(self.params)
        self.wrong_streak = 0
        self.coord = 0.0
        self.history = deque(maxlen=self.policy.lookback)

    def idle_lock(self) -> None:
        """Model an idle gap or handoff: the position collapses to locked and
        stale evidence is discarded. Learned geometry persists."""
        self.coord = 1.0
        self.history.clear()
