"""Confusion-matrix accounting and level-occupancy statistics.

Rates with empty denominators are reported as None, never NaN or a silent
zero. The complement pairs are derived (far = 1 - trr, frr = 1 - tar) so
the identities hold exactly in floating point, not just within an ulp.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .scores import GroundTruth


@dataclass
class MetricsCounters:
    """TA/TR/FA/FR tallies plus a per-(truth, level) window histogram."""

    ta: int = 0
    tr: int = 0
    fa: int = 0
    fr: int = 0
    occupancy: dict = field(default_factory=dict)

    def total(self) -> int:
        return self.ta + self.tr + self.fa + self.fr


def record(counters: MetricsCounters, truth: GroundTruth, decision) -> MetricsCounters:
    """Fold one decision into the counters; returns them for chaining.

    The decision only needs predicted and effective_level attributes, so
    baseline rows tally the same way as engine decisions.
    """
    predicted = decision.predicted
    if truth is GroundTruth.LEGIT:
        if predicted is GroundTruth.LEGIT:
            counters.ta += 1
        else:
            counters.fr += 1
    else:
        if predicted is GroundTruth.ILLEGIT:
            counters.tr += 1
        else:
            counters.fa += 1
    key = (truth.value, decision.effective_level)
    counters.occupancy[key] = counters.occupancy.get(key, 0) + 1
    return counters


def merge(a: MetricsCounters, b: MetricsCounters) -> MetricsCounters:
    """Combine two counter sets; associative and commutative."""
    occupancy = dict(a.occupancy)
    for key, count in b.occupancy.items():
        occupancy[key] = occupancy.get(key, 0) + count
    return MetricsCounters(
        ta=a.ta + b.ta, tr=a.tr + b.tr, fa=a.fa + b.fa, fr=a.fr + b.fr, occupancy=occupancy
    )


@dataclass(frozen=True)
class MetricsReport:
    ta: int
    tr: int
    fa: int
    fr: int
    acc: float | None
    prec: float | None
    tar: float | None
    trr: float | None
    far: float | None
    frr: float | None


def rates(counters: MetricsCounters) -> MetricsReport:
    """Rates from counts; far/frr are exact complements of trr/tar."""
    ta, tr, fa, fr = counters.ta, counters.tr, counters.fa, counters.fr
    total = ta + tr + fa + fr
    acc = (ta + tr) / total if total else None
    prec = ta / (ta + fa) if ta + fa else None
    tar = ta / (ta + fr) if ta + fr else None
    trr = tr / (tr + fa) if tr + fa else None
    far = None if trr is None else 1.0 - trr
    frr = None if tar is None else 1.0 - tar
    return MetricsReport(ta=ta, tr=tr, fa=fa, fr=fr, acc=acc, prec=prec, tar=tar, trr=trr, far=far, frr=frr)


def occupancy_fractions(counters: MetricsCounters) -> dict:
    """Per-truth-bucket level fractions: {truth value: {level: fraction}}.

    Each bucket's fractions sum to 1; an absent bucket simply has no key.
    """
    totals: dict[str, int] = {}
    for (truth, _level), count in counters.occupancy.items():
        totals[truth] = totals.get(truth, 0) + count
    out: dict[str, dict[int, float]] = {}
    for (truth, level), count in sorted(counters.occupancy.items()):
        out.setdefault(truth, {})[level] = count / totals[truth]
    return out
