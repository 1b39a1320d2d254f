"""Greedy operator errors and best N-term errors.

gamma_N is the worst residual over every tie resolution of the greedy
operator; tie resolutions are enumerated as per-block counts at the
threshold magnitude, which is lossless because every norm here is
symmetric within blocks.  sigma_N uses the suppression-projection
reduction: for a normalized lattice-unconditional basis the optimal
N-term approximant matches the vector on its support, so sigma_N is a
minimum over removal sets, and within one block it is always best to
remove the largest magnitudes first.  The reduction is not taken on
faith: a grid-search oracle over free coefficients validates it on small
instances (see sigma_oracle_grid and the acceptance suite).
"""

from __future__ import annotations

import bisect
import functools
import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from . import explicit
from .errors import TieBudgetError
from .errorseq import (
    ErrorSequence,
    TabulatedErrorSequence,
    TwoPoolErrorSequence,
    two_pool_params,
)
from .exact import pow_rational, simplify
from .spaces import NormValue, SpaceSpec, space_norm, random_vector
from .vectors import CompressedVector, TieDescriptor, EMPTY_TIE, top_magnitudes

Rational = Union[int, Fraction]

DEFAULT_TIE_BUDGET = 10**6


@dataclass(frozen=True)
class GreedyOutcome:
    """Extremes of the residual norm over all greedy tie resolutions."""

    residual_max: NormValue  # this is gamma_N
    residual_min: NormValue
    witness_max: tuple[tuple[int, int], ...]  # per-block kept counts at threshold
    witness_min: tuple[tuple[int, int], ...]
    tie: TieDescriptor


# ---------------------------------------------------------------------------
# Shared per-block prefix machinery


def _block_prefixes(x: CompressedVector, spec: SpaceSpec):
    """Per block: cumulative counts and cumulative magnitude powers.

    With groups sorted descending, the power of the sum of the t largest
    magnitudes in a block is prefix lookup; the residual after dropping
    the j largest and re-truncating to the cap is two lookups.
    """
    p = spec.inner_p
    if spec.inner_p != spec.outer_p or not isinstance(p, int):
        raise ValueError("exact greedy machinery needs integer inner_p == outer_p")
    out = {}
    for b in x.blocks():
        counts = [0]
        powers: list[Rational] = [0]
        mag_powers: list[Rational] = []
        for mag, count in x.block_groups(b):
            mp = pow_rational(mag, p)
            mag_powers.append(mp)
            counts.append(counts[-1] + count)
            powers.append(simplify(powers[-1] + mp * count))
        out[b] = (counts, powers, spec.blocks[b].cap, mag_powers)
    return out


def _prefix_power(prefix, t: int) -> Rational:
    """Power of the t largest magnitudes of one block (grouped prefix sums)."""
    counts, powers, _cap, mag_powers = prefix
    if t <= 0:
        return 0
    if t >= counts[-1]:
        return powers[-1]
    # Locate the group containing position t: counts[g-1] < t <= counts[g].
    g = bisect.bisect_left(counts, t)
    return simplify(powers[g - 1] + mag_powers[g - 1] * (t - counts[g - 1]))


def _residual_power(prefix, removed: int) -> Rational:
    """Block residual power after removing the ``removed`` largest coords."""
    counts, _powers, cap, _mag_powers = prefix
    total = counts[-1]
    if removed >= total:
        return 0
    end = total if cap is None else min(removed + cap, total)
    return simplify(_prefix_power(prefix, end) - _prefix_power(prefix, removed))


# ---------------------------------------------------------------------------
# gamma: worst/best case over tie resolutions


def _tie_allocations(available: Sequence[tuple[int, int]], choose: int):
    """All ways to pick ``choose`` threshold coordinates as per-block counts."""
    blocks = [b for b, _ in available]
    supplies = [c for _, c in available]

    def rec(i: int, left: int):
        if i == len(supplies) - 1:
            if 0 <= left <= supplies[i]:
                yield (left,)
            return
        lo = max(0, left - sum(supplies[i + 1 :]))
        hi = min(supplies[i], left)
        for c in range(lo, hi + 1):
            for rest in rec(i + 1, left - c):
                yield (c,) + rest

    for counts in rec(0, choose):
        yield tuple(zip(blocks, counts))


def _count_allocations(available: Sequence[tuple[int, int]], choose: int) -> int:
    ways = [1] + [0] * choose
    for _, supply in available:
        new = [0] * (choose + 1)
        for total in range(choose + 1):
            if ways[total] == 0:
                continue
            for c in range(0, min(supply, choose - total) + 1):
                new[total + c] += ways[total]
        ways = new
    return ways[choose]


def gamma(
    x: CompressedVector,
    n: int,
    spec: SpaceSpec,
    tie_budget: int = DEFAULT_TIE_BUDGET,
) -> GreedyOutcome:
    """Residual-norm extremes of the greedy operator at step n.

    Enumerates every tie resolution (as per-block counts at the threshold
    magnitude) and refuses outright if there are more than ``tie_budget``
    of them: worst-case semantics must never be sampled.
    """
    x = spec.vector(x.groups)
    p = spec.outer_p
    support = x.support_size
    if n >= support:
        zero = NormValue.from_power(0, p)
        return GreedyOutcome(zero, zero, (), (), EMPTY_TIE)
    if n == 0:
        nv = space_norm(x, spec)
        return GreedyOutcome(nv, nv, (), (), EMPTY_TIE)

    _kept, tie = top_magnitudes(x, n)
    prefixes = _block_prefixes(x, spec)
    if tie.empty:
        # The cut falls on a class boundary: kept counts are unambiguous.
        forced = _forced_counts(x, n, None)
        power = sum(_residual_power(prefixes[b], forced.get(b, 0)) for b in x.blocks())
        nv = NormValue.from_power(power, p)
        return GreedyOutcome(nv, nv, (), (), EMPTY_TIE)

    forced = _forced_counts(x, n, tie.threshold)
    num_allocs = _count_allocations(tie.available, tie.choose)
    if num_allocs > tie_budget:
        raise TieBudgetError(
            f"{num_allocs} tie allocations exceed the budget of {tie_budget}"
        )

    base = {
        b: _residual_power(prefixes[b], forced.get(b, 0)) for b in x.blocks()
    }
    base_total = sum(base.values())
    best_hi = best_lo = None
    wit_hi = wit_lo = ()
    for allocation in _tie_allocations(tie.available, tie.choose):
        total = base_total
        for b, c in allocation:
            if c:
                total = total - base[b] + _residual_power(
                    prefixes[b], forced.get(b, 0) + c
                )
        if best_hi is None or total > best_hi:
            best_hi, wit_hi = total, allocation
        if best_lo is None or total < best_lo:
            best_lo, wit_lo = total, allocation
    return GreedyOutcome(
        NormValue.from_power(best_hi, p),
        NormValue.from_power(best_lo, p),
        wit_hi,
        wit_lo,
        tie,
    )


def _forced_counts(
    x: CompressedVector, n: int, threshold: Optional[Fraction]
) -> dict[int, int]:
    """Per-block counts the greedy operator must keep.

    With a tie, these are the coordinates strictly above the threshold.
    Without one, the top-n multiset cuts cleanly between magnitude classes,
    except possibly inside one class confined to a single block.
    """
    if threshold is not None:
        return {
            b: sum(c for m, c in x.block_groups(b) if m > threshold)
            for b in x.blocks()
        }
    counts: dict[int, int] = {b: 0 for b in x.blocks()}
    remaining = n
    for mag, total in x.magnitudes():
        if remaining <= 0:
            break
        # Without a tie descriptor every class is kept whole.
        assert total <= remaining, "ambiguous cut without tie descriptor"
        for b in x.blocks():
            counts[b] += sum(c for m, c in x.block_groups(b) if m == mag)
        remaining -= total
    return counts


# ---------------------------------------------------------------------------
# sigma: removal-count DP


@functools.lru_cache(maxsize=256)
def sigma_power_table(x: CompressedVector, spec: SpaceSpec) -> tuple[Rational, ...]:
    """sigma_k^p for k = 0..support, by DP over per-block removal counts.

    Within each block removing the largest magnitudes first is optimal
    (block norms are symmetric and monotone), so only the split of the k
    removals across blocks is searched.
    """
    x = spec.vector(x.groups)
    prefixes = _block_prefixes(x, spec)
    support = x.support_size
    dp: list[Rational] = [0]
    for b in x.blocks():
        t_b = prefixes[b][0][-1]
        residuals = [_residual_power(prefixes[b], j) for j in range(t_b + 1)]
        new_len = len(dp) + t_b
        ndp: list[Optional[Rational]] = [None] * new_len
        for j, prev in enumerate(dp):
            for jb in range(t_b + 1):
                cand = prev + residuals[jb]
                slot = j + jb
                if ndp[slot] is None or cand < ndp[slot]:
                    ndp[slot] = cand
        dp = [simplify(v) for v in ndp]  # type: ignore[arg-type]
    assert len(dp) == support + 1 and dp[support] == 0
    return tuple(dp)


def sigma_exact(x: CompressedVector, n: int, spec: SpaceSpec) -> NormValue:
    """Best n-term approximation error (exact, suppression projection)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    table = sigma_power_table(spec.vector(x.groups), spec)
    power = table[n] if n < len(table) else 0
    return NormValue.from_power(power, spec.outer_p)


# ---------------------------------------------------------------------------
# Grid-search oracle over free coefficients


def sigma_oracle_grid(
    values: Sequence, n: int, spec: SpaceSpec, coeff_bound: float = 9.0
) -> float:
    """Brute-force sigma_n over supports AND free coefficients.

    Enumerates every support of size n; for each, minimizes the residual
    norm over coefficients on an integer grid followed by halving-window
    refinement (the objective is convex in the coefficients, so the local
    refinement reaches the global minimum).  Exists solely to validate
    that free coefficients never beat plain suppression.
    """
    dim = len(values)
    if dim > 4:
        raise ValueError("grid oracle is limited to dimension <= 4")
    vals = [float(v) for v in values]
    if any(abs(v) > 8 for v in vals):
        raise ValueError("grid oracle expects magnitudes <= 8")
    if n == 0:
        return explicit.norm_float(vals, spec)
    if n >= dim:
        return 0.0

    lo_i, hi_i = -int(coeff_bound), int(coeff_bound)
    best_overall = math.inf
    for support in itertools.combinations(range(dim), n):
        residual = list(vals)

        def objective(coeffs: tuple[float, ...]) -> float:
            for i, c in zip(support, coeffs):
                residual[i] = vals[i] - c
            out = explicit.norm_float(residual, spec)
            for i in support:
                residual[i] = vals[i]
            return out

        best_val = math.inf
        best_pt: tuple[float, ...] = ()
        for point in itertools.product(range(lo_i, hi_i + 1), repeat=n):
            val = objective(tuple(float(c) for c in point))
            if val < best_val:
                best_val, best_pt = val, tuple(float(c) for c in point)

        step = 1.0
        while step > 1e-8:
            step /= 2.0
            offsets = (-2 * step, -step, 0.0, step, 2 * step)
            improved = True
            while improved:
                improved = False
                for delta in itertools.product(offsets, repeat=n):
                    cand = tuple(b + d for b, d in zip(best_pt, delta))
                    val = objective(cand)
                    if val < best_val - 1e-15:
                        best_val, best_pt = val, cand
                        improved = True
        best_overall = min(best_overall, best_val)
    return best_overall


# ---------------------------------------------------------------------------
# Error sequences


def error_sequence(
    x: CompressedVector,
    spec: SpaceSpec,
    kind: str,
    tie_budget: int = DEFAULT_TIE_BUDGET,
) -> ErrorSequence:
    """Full k -> sigma_k or gamma_k sequence for one vector.

    Two-pool vectors get the O(1)-per-k closed forms; anything else is
    tabulated with the generic machinery (gamma uses the worst case over
    tie resolutions at every k).
    """
    if kind not in ("sigma", "gamma"):
        raise ValueError("kind must be 'sigma' or 'gamma'")
    x = spec.vector(x.groups)
    params = two_pool_params(x, spec)
    if params is not None:
        return TwoPoolErrorSequence(kind, params)
    if kind == "sigma":
        return TabulatedErrorSequence("sigma", sigma_power_table(x, spec), spec.outer_p)
    table = tuple(
        gamma(x, k, spec, tie_budget).residual_max.power_exact
        for k in range(x.support_size + 1)
    )
    return TabulatedErrorSequence("gamma", table, spec.outer_p)


# ---------------------------------------------------------------------------
# Constant estimators


def greedy_constant(
    spec: SpaceSpec,
    num_samples: int = 100,
    seed: int = 0,
    include_adversarial: bool = True,
) -> float:
    """Sample supremum of gamma_N / sigma_N (the greedy constant witness).

    For l_p spaces this is exactly 1 (a greedy support is an optimal
    support).  On block sums, two-pool vectors at depth k witness ratios
    around sqrt(a_{k+1})/2, so the estimate grows with the materialized
    depth.  A sample supremum, not a certified constant.
    """
    rng = random.Random(seed)
    best = 0.0
    for _ in range(num_samples):
        x = random_vector(spec, rng)
        if x.is_zero:
            continue
        table = sigma_power_table(x, spec)
        for n in range(x.support_size):
            s_pow = table[n]
            if s_pow == 0:
                continue
            g_pow = gamma(x, n, spec).residual_max.power_exact
            ratio = (float(g_pow) / float(s_pow)) ** (1.0 / spec.outer_p)
            best = max(best, ratio)
    if include_adversarial and spec.variant == "block_sum":
        for hi in range(spec.num_blocks - 1):
            block, nxt = spec.blocks[hi], spec.blocks[hi + 1]
            count_lo = min(block.size, nxt.cap)
            x = spec.vector([(hi, 2, block.size), (hi + 1, 1, count_lo)])
            if two_pool_params(x, spec) is None:
                continue
            s_seq = error_sequence(x, spec, "sigma")
            g_seq = error_sequence(x, spec, "gamma")
            for k in (block.size, block.size - block.cap):
                if k <= 0:
                    continue
                s_pow, g_pow = s_seq.power(k), g_seq.power(k)
                if s_pow == 0:
                    continue
                ratio = (float(g_pow) / float(s_pow)) ** (1.0 / spec.outer_p)
                best = max(best, ratio)
    return best


def democracy_constant(spec: SpaceSpec, n: int, mode: str = "auto") -> float:
    """h_r(n) / h_l(n): worst ratio of indicator norms at cardinality n."""
    from . import democracy  # local import: democracy does not import greedy

    if n == 0:
        return 1.0
    if mode not in ("auto", "exact", "bruteforce"):
        raise ValueError("mode must be auto, exact or bruteforce")
    if spec.variant == "lp":
        return 1.0
    if mode == "bruteforce" or (mode == "auto" and (spec.dimension() or 10**9) <= 16):
        hl, hr = explicit.demfun_bruteforce(spec, n)
    else:
        point = democracy.demfun_dp(spec, n)
        hl, hr = point.hl_power, point.hr_power
    return (float(hr) / float(hl)) ** (1.0 / spec.outer_p)
