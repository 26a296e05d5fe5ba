"""Per-window latency measurement over a synthetic but realistic workload.

The workload is generated once, outside the timed region, so the clock
sees only process_window. Two windows of interest get robust medians: an
early bucket around window 10 and a late bucket around window 10,000.
Their ratio is the constant-cost check: a per-window cost that grows with
history would show up as a ratio well above 1.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

from . import _backend
from .engine import Engine
from .errors import DomainError
from .scores import PasswordEvent, ScoreSample
from .simulator import SeedStream, UserKind, UserModel, draw_training, sample_score

__all__ = ["BenchResult", "synthetic_samples", "run_bench", "format_result"]

_EARLY_BUCKET = (5, 105)
_LATE_ANCHOR = 10_000


@dataclass(frozen=True)
class BenchResult:
    backend: str
    windows: int
    total_s: float
    per_window_us: float
    early_median_us: float | None
    late_median_us: float | None
    ratio: float | None


def synthetic_samples(windows: int, seed: str = "bench") -> list[ScoreSample]:
    """Deterministic sample stream with password events sprinkled in.

    Correct entries land every 5th window and wrong entries on a sparse
    11-window cycle; corrects always interleave, so the wrong streak never
    reaches the explosion limit and the heavy expansion path stays active
    for the whole run.
    """

    stream = SeedStream(seed)
    owner = UserModel(kind=UserKind.LEGIT, beta_a=2.0, beta_b=5.0, noise_sd=0.05)
    samples = []
    for window in range(windows):
        if window % 5 == 3:
            event = PasswordEvent.CORRECT
        elif window % 11 == 7:
            event = PasswordEvent.WRONG
        else:
            event = PasswordEvent.NONE
        samples.append(
            ScoreSample(
                window_index=window,
                timestamp_s=window * 15.0,
                score=sample_score(owner, window, stream),
                password_event=event,
            )
        )
    return samples


def _bench_engine(seed: str) -> Engine:
    stream = SeedStream(seed)
    owner = UserModel(kind=UserKind.LEGIT, beta_a=2.0, beta_b=5.0, noise_sd=0.05)
    other = UserModel(kind=UserKind.GUESSER, beta_a=5.0, beta_b=2.0, noise_sd=0.05)
    legit_train = draw_training(owner, 200, stream, "legit")
    illegit_train = draw_training(other, 200, stream, "illegit")
    return Engine.from_training(legit_train, illegit_train)


def _median_us(timings_ns: list[int], lo: int, hi: int) -> float | None:
    bucket = timings_ns[lo:hi]
    if not bucket:
        return None
    return statistics.median(bucket) / 1e3


def run_bench(windows: int = 20_000, backend: str | None = None, seed: str = "bench") -> BenchResult:
    """Time process_window over the synthetic workload.

    backend names an explicit kernel set ("python" or "compiled"); None
    keeps whatever is active. The previous binding is restored afterwards.
    """

    if windows < 1:
        raise DomainError("windows must be >= 1")
    previous = None
    if backend is not None:
        previous = _backend.use(backend)
    try:
        engine = _bench_engine(seed)
        samples = synthetic_samples(windows, seed)
        timings_ns = []
        clock = time.perf_counter_ns
        for sample in samples:
            start = clock()
            engine.process_window(sample)
            timings_ns.append(clock() - start)
    finally:
        if previous is not None:
            _backend.use(previous)

    total_s = sum(timings_ns) / 1e9
    early = _median_us(timings_ns, *_EARLY_BUCKET)
    if windows >= _LATE_ANCHOR + 55:
        late = _median_us(timings_ns, _LATE_ANCHOR - 50, _LATE_ANCHOR + 50)
    else:
        # shorter runs: use the last full hundred before the tail
        late = _median_us(timings_ns, max(0, windows - 105), windows - 5)
    ratio = None
    if early and late:
        ratio = late / early
    return BenchResult(
        backend=backend or _backend.BACKEND_NAME,
        windows=windows,
        total_s=total_s,
        per_window_us=total_s / windows * 1e6,
        early_median_us=early,
        late_median_us=late,
        ratio=ratio,
    )


def format_result(result: BenchResult) -> str:
    """Human-readable block, one stat per line."""

    def fmt(value: float | None) -> str:
        return "n/a" if value is None else f"{value:.6g}"

    return "\n".join(
        [
            f"backend = {result.backend}",
            f"windows = {result.windows}",
            f"total_s = {result.total_s:.6g}",
            f"per_window_us = {result.per_window_us:.6g}",
            f"early_median_us = {fmt(result.early_median_us)}",
            f"late_median_us = {fmt(result.late_median_us)}",
            f"ratio = {fmt(result.ratio)}",
        ]
    )
