"""Norm evaluators vs the sup-form oracle and an explicit signed backend."""

import math
import random
from fractions import Fraction

import pytest

from greedylab import (
    BlockSchedule,
    NormValue,
    OracleUnavailableError,
    SpaceSpec,
    arithmetic_schedule,
    lattice_check,
    space_from_json,
    space_norm,
    sup_form_norm_oracle,
    trunc_block_norm,
)
from greedylab import explicit


# -- truncated block norm ----------------------------------------------------


def test_indicator_above_cap_gives_sqrt_cap():
    # 9 unit coordinates, cap 4: the two-case display gives sqrt(4) = 2.
    nv = trunc_block_norm([1] * 9, 4)
    assert nv.power_exact == 4 and nv.value == 2.0


def test_indicator_below_cap_gives_sqrt_count():
    nv = trunc_block_norm([1] * 3, 4)
    assert nv.power_exact == 3


def test_top_two_of_3221():
    # Frozen from the subset-enumeration oracle: max over 2-subsets is 3^2+2^2.
    assert trunc_block_norm([3, 2, 2, 1], 2).power_exact == 13


def test_cap_at_least_support_is_plain_lp():
    assert trunc_block_norm([3, 2, 2, 1], 10).power_exact == 9 + 4 + 4 + 1
    assert trunc_block_norm([3, 2, 1], 3, p=1).power_exact == 6


# -- sup-form oracle ----------------------------------------------------------


def test_sup_oracle_examples():
    assert sup_form_norm_oracle([3, 2, 2, 1], 2).power_exact == 13
    assert sup_form_norm_oracle([3, 2, 2, 1], 4).power_exact == 18
    assert sup_form_norm_oracle([1] * 5, 3).power_exact == 3


def test_sup_oracle_rejects_oversize_support():
    with pytest.raises(OracleUnavailableError):
        sup_form_norm_oracle([1] * 30, 2)


def test_trunc_norm_equals_sup_oracle_exhaustively():
    # Every p=2 instance with support <= 12 drawn from a seeded pool.
    rng = random.Random(2)
    for _ in range(150):
        support = rng.randint(0, 12)
        coords = [rng.randint(0, 6) for _ in range(support)]
        cap = rng.randint(1, 13)
        assert trunc_block_norm(coords, cap).power_exact == sup_form_norm_oracle(
            coords, cap
        ).power_exact


# -- space norms --------------------------------------------------------------


def test_block_sum_indicator_examples():
    spec = SpaceSpec.from_schedule(arithmetic_schedule(2))  # a=(4,5,6)
    one_block = spec.indicator({0: 20})
    assert space_norm(one_block, spec).power_exact == 4  # min(20, 4)
    split = spec.indicator({0: 4, 1: 16})
    assert space_norm(split, spec).power_exact == 20  # 4 + 16
    assert space_norm(spec.vector([]), spec).power_exact == 0


def test_block_sum_cross_checked_with_sup_oracle_on_shrunken_analogue():
    # One block (cap 2, size 5): compressed norm of 5 ones vs the oracle.
    spec = SpaceSpec.trunc_block(2, 5, 2)
    v = spec.indicator({0: 5})
    assert space_norm(v, spec).power_exact == sup_form_norm_oracle([1] * 5, 2).power_exact


def test_indicator_block_sum_power_is_integer_sum_of_mins():
    rng = random.Random(3)
    for _ in range(100):
        blocks = [(rng.randint(1, 3), rng.randint(3, 6)) for _ in range(rng.randint(1, 3))]
        spec = SpaceSpec.block_sum(blocks)
        counts = {b: rng.randint(0, size) for b, (_, size) in enumerate(blocks)}
        v = spec.indicator(counts)
        expected = sum(min(m, blocks[b][0]) for b, m in counts.items())
        power = space_norm(v, spec).power_exact
        assert power == expected and isinstance(power, int)


def test_norm_monotone_in_magnitudes():
    rng = random.Random(4)
    spec = SpaceSpec.block_sum([(2, 5), (3, 7)])
    from greedylab.spaces import random_vector

    for _ in range(100):
        x = random_vector(spec, rng)
        if x.is_zero:
            continue
        b, mag, _count = x.groups[rng.randrange(len(x.groups))]
        bumped = spec.vector(
            [(bb, mm + (1 if (bb, mm) == (b, mag) else 0), cc) for bb, mm, cc in x.groups]
        )
        assert space_norm(bumped, spec).power_exact >= space_norm(x, spec).power_exact


def test_norm_blind_to_permutations_and_signs():
    rng = random.Random(5)
    spec = SpaceSpec.block_sum([(2, 5), (3, 6)])
    from greedylab.spaces import random_vector

    for _ in range(60):
        x = random_vector(spec, rng)
        reference = space_norm(x, spec).power_exact
        for _ in range(3):
            shuffled = explicit.to_explicit(x, spec, rng)  # random slots and signs
            assert explicit.norm_power(shuffled, spec) == reference


def test_triangle_inequality_sampled():
    rng = random.Random(6)
    spec = SpaceSpec.block_sum([(2, 4), (3, 6)])
    dim = spec.dimension()
    for _ in range(150):
        a = [rng.uniform(-4, 4) for _ in range(dim)]
        b = [rng.uniform(-4, 4) for _ in range(dim)]
        lhs = explicit.norm_float([x + y for x, y in zip(a, b)], spec)
        rhs = explicit.norm_float(a, spec) + explicit.norm_float(b, spec)
        assert lhs <= rhs * (1 + 1e-9)


def test_mixed_exponents_fall_back_to_float():
    # outer 1, inner 2: two singleton blocks of magnitudes 3 and 4 give
    # block norms 3 and 4, combined by plain summation.
    spec = SpaceSpec.block_sum([(1, 2), (1, 2)], inner_p=2, outer_p=1)
    v = spec.vector([(0, 3, 1), (1, 4, 1)])
    nv = space_norm(v, spec)
    assert nv.power_exact is None
    assert nv.value == pytest.approx(7.0)


def test_norm_value_float_tracks_exact_power():
    rng = random.Random(7)
    for _ in range(200):
        power = Fraction(rng.randint(0, 10**6), rng.randint(1, 100))
        nv = NormValue.from_power(power, 2)
        assert math.isclose(nv.value**2, float(power), rel_tol=1e-12)


# -- lattice property ---------------------------------------------------------


def test_lattice_scaling_in_l1_is_exact():
    spec = SpaceSpec.lp(1, 4)
    x = spec.vector([(0, 2, 2), (0, 1, 1)])
    half = x.scale(Fraction(1, 2))
    assert space_norm(half, spec).power_exact * 2 == space_norm(x, spec).power_exact


def test_basis_vectors_are_normalized():
    spec = SpaceSpec.trunc_block(4, 16, 2)
    e1 = spec.indicator({0: 1})
    assert space_norm(e1, spec).power_exact == 1


def test_lattice_check_block_sum_200_trials():
    spec = SpaceSpec.from_schedule(arithmetic_schedule(2))
    report = lattice_check(spec, trials=200, seed=0)
    assert report.passed, report.failures


# -- JSON loaders -------------------------------------------------------------


def test_space_json_shapes():
    sched = space_from_json({"a": [4, 5, 6], "K": 2})
    assert sched.schedule is not None and sched.schedule.a == (4, 5, 6)
    lp = space_from_json({"lp": 1, "dim": 6})
    assert lp.variant == "lp" and lp.blocks[0].size == 6
    tb = space_from_json({"cap": 2, "size": 4, "p": 2})
    assert tb.variant == "trunc_block"
    bs = space_from_json({"blocks": [[2, 4], [3, 6]]})
    assert bs.num_blocks == 2
    with pytest.raises(ValueError):
        space_from_json({"nonsense": 1})


def test_schedule_validation():
    with pytest.raises(ValueError):
        BlockSchedule((3, 5, 6))  # first multiplier below 4
    BlockSchedule((3, 5, 6), allow_slow_start=True)
    with pytest.raises(ValueError):
        BlockSchedule((4, 4, 5))  # not strictly increasing
    sched = BlockSchedule((4, 5, 6, 7))
    assert sched.num_blocks == 3
    assert sched.caps() == [4, 20, 120]
    assert sched.sizes() == [20, 120, 840]
    assert sched.truncate(2).a == (4, 5, 6)
