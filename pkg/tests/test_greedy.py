"""Greedy errors, best N-term errors and the oracle cross-checks."""

import math
import random

import pytest

from greedylab import (
    SpaceSpec,
    TieBudgetError,
    arithmetic_schedule,
    democracy_constant,
    error_sequence,
    gamma,
    greedy_constant,
    sigma_exact,
    sigma_oracle_grid,
)
from greedylab import explicit
from greedylab.greedy import sigma_power_table
from greedylab.spaces import random_vector


# -- gamma --------------------------------------------------------------------


def test_gamma_l1_no_tie():
    spec = SpaceSpec.lp(1, 4)
    x = spec.vector([(0, 3, 1), (0, 2, 2), (0, 1, 1)])
    out = gamma(x, 1, spec)
    # keep the 3: residual l1 norm is 2+2+1 = 5
    assert out.residual_max.power_exact == 5
    assert out.residual_min.power_exact == 5


def test_gamma_two_block_tie_extremes():
    # Frozen from raw subset enumeration: allocations (2,0),(1,1) give
    # residual power 2; (0,2) leaves two coords under cap 1, power 1.
    spec = SpaceSpec.block_sum([(1, 4), (3, 6)])
    x = spec.indicator({0: 2, 1: 2})
    out = gamma(x, 2, spec)
    assert out.residual_max.power_exact == 2
    assert out.residual_min.power_exact == 1
    assert dict(out.witness_min) == {0: 0, 1: 2}
    vals = explicit.to_explicit(x, spec)
    assert explicit.gamma_raw(vals, 2, spec) == (2, 1)


def test_gamma_beyond_support_is_zero():
    spec = SpaceSpec.lp(2, 4)
    x = spec.vector([(0, 2, 2)])
    out = gamma(x, 7, spec)
    assert out.residual_max.power_exact == 0 and out.tie.empty


def test_gamma_refuses_over_tie_budget():
    spec = SpaceSpec.block_sum([(2, 40), (2, 40)])
    x = spec.indicator({0: 30, 1: 30})
    with pytest.raises(TieBudgetError):
        gamma(x, 30, spec, tie_budget=5)


def test_gamma_compressed_equals_raw_enumeration_random():
    rng = random.Random(10)
    for _ in range(40):
        blocks = [(rng.randint(1, 3), rng.randint(3, 5)) for _ in range(2)]
        spec = SpaceSpec.block_sum(blocks)
        x = random_vector(spec, rng, max_mag=3)
        if x.is_zero:
            continue
        n = rng.randint(0, x.support_size)
        out = gamma(x, n, spec)
        vals = explicit.to_explicit(x, spec, rng)
        hi, lo = explicit.gamma_raw(vals, n, spec)
        assert out.residual_max.power_exact == hi
        assert out.residual_min.power_exact == lo
        assert lo <= hi


# -- sigma --------------------------------------------------------------------


def test_sigma_l1_examples():
    spec = SpaceSpec.lp(1, 3)
    x = spec.vector([(0, 3, 1), (0, 2, 1), (0, 1, 1)])
    assert sigma_exact(x, 1, spec).power_exact == 3
    assert sigma_exact(x, 0, spec).power_exact == 6
    assert sigma_exact(x, 3, spec).power_exact == 0


def test_sigma_block_sum_example():
    spec = SpaceSpec.from_schedule(arithmetic_schedule(2))
    x = spec.indicator({0: 20})
    assert sigma_exact(x, 16, spec).power_exact == 4  # residual 4 ones, cap 4


def test_sigma_matches_removal_bruteforce():
    rng = random.Random(11)
    for _ in range(40):
        blocks = [(rng.randint(1, 2), rng.randint(2, 4)) for _ in range(2)]
        spec = SpaceSpec.block_sum(blocks)
        x = random_vector(spec, rng, max_mag=4)
        n = rng.randint(0, x.support_size + 1)
        vals = explicit.to_explicit(x, spec, rng)
        assert sigma_exact(x, n, spec).power_exact == explicit.sigma_removals_bruteforce(
            vals, n, spec
        )


def test_sigma_grid_oracle_trivials():
    assert sigma_oracle_grid([1, 1], 1, SpaceSpec.lp(2, 2)) == pytest.approx(1.0, abs=1e-9)
    assert sigma_oracle_grid([2, 2], 2, SpaceSpec.lp(1, 2)) == 0.0
    spec = SpaceSpec.lp(1, 3)
    assert sigma_oracle_grid([3, 2, 1], 1, spec) == pytest.approx(3.0, abs=1e-6)


def test_sigma_grid_oracle_validates_suppression_on_trunc_block():
    rng = random.Random(12)
    spec = SpaceSpec.trunc_block(2, 4, 2)
    for _ in range(10):
        values = [rng.randint(0, 8) for _ in range(4)]
        n = rng.randint(1, 3)
        x = explicit.from_explicit(values, spec)
        exact = float(sigma_exact(x, n, spec))
        assert abs(exact - sigma_oracle_grid(values, n, spec)) < 1e-6


# -- joint properties ---------------------------------------------------------


def test_sigma_le_gamma_and_monotone_and_vanishing():
    rng = random.Random(13)
    specs = [
        SpaceSpec.lp(1, 6),
        SpaceSpec.lp(2, 6),
        SpaceSpec.block_sum([(2, 5), (3, 6)]),
    ]
    for spec in specs:
        for _ in range(25):
            x = random_vector(spec, rng)
            table = sigma_power_table(x, spec)
            gammas = [
                gamma(x, n, spec).residual_max.power_exact
                for n in range(x.support_size + 1)
            ]
            for n in range(x.support_size + 1):
                assert table[n] <= gammas[n]
            assert all(a >= b for a, b in zip(table, table[1:]))
            assert all(a >= b for a, b in zip(gammas, gammas[1:]))
            assert table[x.support_size] == 0 and gammas[x.support_size] == 0


def test_lp_gamma_equals_sigma_when_tie_free():
    rng = random.Random(14)
    for p in (1, 2, 3):
        spec = SpaceSpec.lp(p, 6)
        for _ in range(30):
            mags = rng.sample(range(1, 50), 5)
            x = spec.vector([(0, m, 1) for m in mags])
            table = sigma_power_table(x, spec)
            for n in range(x.support_size + 1):
                assert gamma(x, n, spec).residual_max.power_exact == table[n]


# -- error sequences ----------------------------------------------------------


def test_error_sequence_two_pool_closed_form_selected():
    spec = SpaceSpec.from_schedule(arithmetic_schedule(2))
    x = spec.vector([(0, 2, 20), (1, 1, 20)])
    seq = error_sequence(x, spec, "sigma")
    assert seq.support_size == 40
    assert seq.power(40) == 0
    # sigma_20: drop all ones -> residual 20 twos capped at 4 -> 16
    assert seq.power(20) == 16
    gam = error_sequence(x, spec, "gamma")
    assert gam.power(20) == 20  # residual is the 20 ones under cap 20


def test_error_sequence_tabulated_matches_pointwise_calls():
    spec = SpaceSpec.block_sum([(2, 4), (2, 4)])
    x = spec.vector([(0, 3, 2), (0, 1, 1), (1, 1, 2)])
    sig = error_sequence(x, spec, "sigma")
    gam = error_sequence(x, spec, "gamma")
    for n in range(x.support_size + 1):
        assert sig.power(n) == sigma_exact(x, n, spec).power_exact
        assert gam.power(n) == gamma(x, n, spec).residual_max.power_exact


# -- constants ----------------------------------------------------------------


def test_greedy_constant_is_one_on_lp():
    for p in (1, 2):
        spec = SpaceSpec.lp(p, 8)
        c = greedy_constant(spec, num_samples=40, seed=15)
        assert c == pytest.approx(1.0, abs=1e-12)


def test_greedy_constant_exceeds_two_on_deep_block_sum():
    # Two-pool witness at depth k has ratio sqrt(a_{k+1})/2, so depth 14
    # of the 4,5,6,... family crosses 2.
    spec = SpaceSpec.from_schedule(arithmetic_schedule(14))
    c = greedy_constant(spec, num_samples=0, seed=0)
    assert c > 2.0
    assert c == pytest.approx(math.sqrt(17.0 / 4.0), rel=1e-9)


def test_greedy_constant_skips_single_coordinate_ratios():
    spec = SpaceSpec.lp(2, 2)
    # a single-coordinate vector has sigma_1 = 0; the estimator must skip it
    c = greedy_constant(spec, num_samples=20, seed=16)
    assert c <= 1.0 + 1e-12


def test_democracy_constant_values():
    assert democracy_constant(SpaceSpec.lp(1, 6), 3) == 1.0
    spec = SpaceSpec.from_schedule(arithmetic_schedule(3))
    assert democracy_constant(spec, 40) == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert democracy_constant(spec, 1) == 1.0
