"""Confusion counters, rate formulas, complements, and occupancy."""

from __future__ import annotations

import random
from dataclasses import dataclass

import pytest
from hypothesis import given, strategies as st

from privmap import (
    GroundTruth,
    MetricsCounters,
    merge,
    occupancy_fractions,
    rates,
    record,
)


@dataclass(frozen=True)
class _Verdict:
    """Minimal decision stand-in: record only needs these two fields."""

    predicted: GroundTruth
    effective_level: int


_LEGIT_OK = _Verdict(GroundTruth.LEGIT, 1)
_LEGIT_BAD = _Verdict(GroundTruth.ILLEGIT, 4)
_ILLEGIT_OK = _Verdict(GroundTruth.ILLEGIT, 4)
_ILLEGIT_BAD = _Verdict(GroundTruth.LEGIT, 1)


def test_record_routes_to_quadrants():
    counters = MetricsCounters()
    record(counters, GroundTruth.LEGIT, _LEGIT_OK)
    record(counters, GroundTruth.ILLEGIT, _ILLEGIT_OK)
    record(counters, GroundTruth.LEGIT, _LEGIT_BAD)
    record(counters, GroundTruth.ILLEGIT, _ILLEGIT_BAD)
    assert (counters.ta, counters.tr, counters.fr, counters.fa) == (1, 1, 1, 1)
    assert counters.total() == 4
    assert counters.occupancy[("legit", 1)] == 1
    assert counters.occupancy[("legit", 4)] == 1
    assert counters.occupancy[("illegit", 4)] == 1
    assert counters.occupancy[("illegit", 1)] == 1
    assert sum(counters.occupancy.values()) == counters.total()


def test_rates_worked_values():
    counters = MetricsCounters(ta=89, tr=69, fa=31, fr=11)
    report = rates(counters)
    assert report.acc == pytest.approx(0.79, abs=1e-12)
    assert report.prec == pytest.approx(0.7417, abs=1e-4)
    assert report.tar == pytest.approx(0.89, abs=1e-12)
    assert report.trr == pytest.approx(0.69, abs=1e-12)
    assert report.far == pytest.approx(0.31, abs=1e-12)
    assert report.frr == pytest.approx(0.11, abs=1e-12)


def test_rates_complement_identity_is_exact():
    report = rates(MetricsCounters(ta=89, tr=69, fa=31, fr=11))
    assert report.far == 1.0 - report.trr
    assert report.frr == 1.0 - report.tar


def test_rates_published_pair_within_printed_rounding():
    """A two-decimal pair like 69.39 / 30.62 can disagree with the exact
    complement by at most one unit in the last printed place."""
    counters = MetricsCounters(ta=0, tr=6939, fa=3061, fr=0)
    report = rates(counters)
    assert report.trr == pytest.approx(0.6939, abs=1e-12)
    assert report.far == 1.0 - report.trr
    assert abs(report.far * 100.0 - 30.62) <= 0.01 + 1e-9


def test_rates_all_zero_counters_undefined():
    report = rates(MetricsCounters())
    assert report.acc is None
    assert report.prec is None
    assert report.tar is None
    assert report.trr is None
    assert report.far is None
    assert report.frr is None


def test_rates_partial_denominators():
    report = rates(MetricsCounters(ta=5, fr=5))
    assert report.tar == 0.5
    assert report.frr == 0.5
    assert report.trr is None
    assert report.far is None
    assert report.acc == 0.5


@given(
    ta=st.integers(min_value=0, max_value=10_000),
    tr=st.integers(min_value=0, max_value=10_000),
    fa=st.integers(min_value=0, max_value=10_000),
    fr=st.integers(min_value=0, max_value=10_000),
)
def test_complements_exact_property(ta, tr, fa, fr):
    report = rates(MetricsCounters(ta=ta, tr=tr, fa=fa, fr=fr))
    if report.trr is None:
        assert report.far is None
    else:
        assert report.far == 1.0 - report.trr
    if report.tar is None:
        assert report.frr is None
    else:
        assert report.frr == 1.0 - report.tar


def _random_counters(rng):
    counters = MetricsCounters(
        ta=rng.randrange(50),
        tr=rng.randrange(50),
        fa=rng.randrange(50),
        fr=rng.randrange(50),
    )
    for _ in range(rng.randrange(6)):
        key = (rng.choice(("legit", "illegit")), rng.randrange(1, 5))
        counters.occupancy[key] = counters.occupancy.get(key, 0) + rng.randrange(1, 9)
    return counters


def test_merge_matches_elementwise_sum():
    rng = random.Random(3)
    for _ in range(50):
        a, b = _random_counters(rng), _random_counters(rng)
        merged = merge(a, b)
        assert merged.ta == a.ta + b.ta
        assert merged.tr == a.tr + b.tr
        assert merged.fa == a.fa + b.fa
        assert merged.fr == a.fr + b.fr
        keys = set(a.occupancy) | set(b.occupancy)
        for key in keys:
            assert merged.occupancy[key] == a.occupancy.get(key, 0) + b.occupancy.get(key, 0)


def test_merge_associative_and_commutative():
    rng = random.Random(9)
    for _ in range(30):
        a, b, c = (_random_counters(rng) for _ in range(3))
        left = merge(merge(a, b), c)
        right = merge(a, merge(b, c))
        assert (left.ta, left.tr, left.fa, left.fr) == (right.ta, right.tr, right.fa, right.fr)
        assert left.occupancy == right.occupancy
        ab, ba = merge(a, b), merge(b, a)
        assert (ab.ta, ab.tr, ab.fa, ab.fr) == (ba.ta, ba.tr, ba.fa, ba.fr)
        assert ab.occupancy == ba.occupancy


def test_fold_equals_bruteforce_recount():
    """rates over a record-fold must equal direct recomputation from the log."""
    rng = random.Random(17)
    log = []
    for _ in range(500):
        truth = rng.choice((GroundTruth.LEGIT, GroundTruth.ILLEGIT))
        verdict = rng.choice((_LEGIT_OK, _LEGIT_BAD))
        log.append((truth, verdict))
    counters = MetricsCounters()
    for truth, verdict in log:
        record(counters, truth, verdict)
    ta = sum(1 for t, v in log if t is GroundTruth.LEGIT and v.predicted is GroundTruth.LEGIT)
    fr = sum(1 for t, v in log if t is GroundTruth.LEGIT and v.predicted is GroundTruth.ILLEGIT)
    tr = sum(1 for t, v in log if t is GroundTruth.ILLEGIT and v.predicted is GroundTruth.ILLEGIT)
    fa = sum(1 for t, v in log if t is GroundTruth.ILLEGIT and v.predicted is GroundTruth.LEGIT)
    assert (counters.ta, counters.fr, counters.tr, counters.fa) == (ta, fr, tr, fa)
    assert rates(counters) == rates(MetricsCounters(ta=ta, tr=tr, fa=fa, fr=fr, occupancy=counters.occupancy))


def test_occupancy_fractions_normalized_per_bucket():
    counters = MetricsCounters()
    for _ in range(3):
        record(counters, GroundTruth.LEGIT, _LEGIT_OK)
    record(counters, GroundTruth.LEGIT, _Verdict(GroundTruth.LEGIT, 2))
    record(counters, GroundTruth.ILLEGIT, _ILLEGIT_OK)
    fractions = occupancy_fractions(counters)
    assert abs(sum(fractions["legit"].values()) - 1.0) < 1e-12
    assert abs(sum(fractions["illegit"].values()) - 1.0) < 1e-12
    assert fractions["legit"][1] == pytest.approx(0.75)
    assert fractions["legit"][2] == pytest.approx(0.25)
    assert fractions["illegit"] == {4: 1.0}


def test_occupancy_single_level_fraction_is_one():
    counters = MetricsCounters()
    for _ in range(7):
        record(counters, GroundTruth.LEGIT, _LEGIT_OK)
    assert occupancy_fractions(counters) == {"legit": {1: 1.0}}


def test_occupancy_observation_level_arithmetic():
    """118 observation windows out of 27,138 prints as 0.00435."""
    counters = MetricsCounters(
        ta=27_138, occupancy={("legit", 1): 27_020, ("legit", 2): 118}
    )
    fractions = occupancy_fractions(counters)
    fraction = fractions["legit"][2]
    assert fraction == 118 / 27_138
    assert f"{fraction:.3g}" == "0.00435"
    assert round(fraction, 5) == 0.00435
