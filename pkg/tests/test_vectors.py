"""Compressed vector canonicalization, indicators and top-magnitude cuts."""

import random
from fractions import Fraction

import pytest

from greedylab import CapacityError, CompressedVector, canonicalize, indicator, top_magnitudes
from greedylab.spaces import SpaceSpec


def groups(v):
    return [(b, m, c) for b, m, c in v.groups]


def test_canonicalize_merges_identical_magnitudes():
    v = canonicalize([(0, 1, 3), (0, 1, 2)])
    assert groups(v) == [(0, Fraction(1), 5)]


def test_canonicalize_drops_zero_magnitudes_and_multiplicities():
    v = canonicalize([(0, 2, 1), (0, 0, 7), (1, 3, 0)])
    assert groups(v) == [(0, Fraction(2), 1)]


def test_canonicalize_orders_by_block_then_descending_magnitude():
    v = canonicalize([(1, 1, 5), (0, 3, 1)])
    assert groups(v) == [(0, Fraction(3), 1), (1, Fraction(1), 5)]
    w = canonicalize([(0, 1, 2), (0, 5, 1)])
    assert groups(w) == [(0, Fraction(5), 1), (0, Fraction(1), 2)]


def test_canonicalize_idempotent_on_random_inputs():
    rng = random.Random(0)
    for _ in range(200):
        raw = [
            (rng.randint(0, 3), Fraction(rng.randint(0, 8), rng.randint(1, 4)), rng.randint(0, 5))
            for _ in range(rng.randint(0, 8))
        ]
        once = canonicalize(raw)
        twice = canonicalize(once.groups)
        assert once == twice


def test_canonicalize_rejects_negative_inputs():
    with pytest.raises(ValueError):
        canonicalize([(0, -1, 1)])
    with pytest.raises(ValueError):
        canonicalize([(0, 1, -1)])
    with pytest.raises(ValueError):
        canonicalize([(-1, 1, 1)])


def test_capacity_error_names_the_block():
    with pytest.raises(CapacityError) as err:
        canonicalize([(1, 1, 7)], sizes=[4, 6])
    assert err.value.block == 1
    assert err.value.requested == 7


def test_indicator_examples():
    assert groups(indicator({0: 9})) == [(0, Fraction(1), 9)]
    assert indicator({}).is_zero
    v = indicator({0: 4, 1: 20})
    assert groups(v) == [(0, Fraction(1), 4), (1, Fraction(1), 20)]
    assert v.support_size == 24


def test_indicator_respects_capacity():
    with pytest.raises(CapacityError):
        indicator({0: 5}, sizes=[4])


def test_top_magnitudes_no_tie():
    v = canonicalize([(0, 3, 1), (0, 2, 2), (0, 1, 1)])
    kept, tie = top_magnitudes(v, 2)
    assert kept == [(Fraction(3), 1), (Fraction(2), 1)]
    assert tie.threshold == 2 and tie.choose == 1
    assert tie.available == ((0, 2),)


def test_top_magnitudes_cross_block_tie():
    # Oracle: of the four unit coordinates, any 2 may be kept; the
    # descriptor must expose the (2, 2) split and choose=2.
    v = canonicalize([(0, 1, 2), (1, 1, 2)])
    kept, tie = top_magnitudes(v, 2)
    assert kept == [(Fraction(1), 2)]
    assert tie.threshold == 1
    assert dict(tie.available) == {0: 2, 1: 2}
    assert tie.choose == 2


def test_top_magnitudes_trivial_cases():
    v = canonicalize([(0, 2, 3)])
    kept, tie = top_magnitudes(v, 0)
    assert kept == [] and tie.empty
    kept, tie = top_magnitudes(v, 5)
    assert kept == [(Fraction(2), 3)] and tie.empty


def test_top_magnitudes_accounting_invariant():
    # Unambiguous kept coordinates plus required tie choices always cover
    # min(N, support).
    rng = random.Random(1)
    for _ in range(300):
        raw = [
            (rng.randint(0, 2), rng.randint(0, 4), rng.randint(0, 3))
            for _ in range(rng.randint(0, 6))
        ]
        v = canonicalize(raw)
        n = rng.randint(0, v.support_size + 2)
        kept, tie = top_magnitudes(v, n)
        kept_total = sum(c for _, c in kept)
        assert kept_total == min(n, v.support_size)
        if not tie.empty:
            above = sum(c for m, c in kept if m > tie.threshold)
            assert above + tie.choose == kept_total
            assert 0 < tie.choose < tie.total_available


def test_json_round_trip():
    v = canonicalize([(0, Fraction(3, 2), 1), (2, 1, 10**40)])
    blob = v.to_json()
    assert blob == {"groups": [[0, "3/2", "1"], [2, "1", str(10**40)]]}
    assert CompressedVector.from_json(blob) == v


def test_spec_vector_validates_block_ids():
    spec = SpaceSpec.block_sum([(2, 4), (3, 6)])
    with pytest.raises(ValueError):
        spec.vector([(5, 1, 1)])
