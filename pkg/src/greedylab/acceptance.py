"""The acceptance suite: eleven exact-value and property criteria.

Each criterion is a function returning a CheckResult; run_all executes
them, prints one pass/fail line per criterion with its runtime, and is
reused both by ``greedylab verify`` and by tests/test_acceptance.py.
Everything is seeded and exact where the criterion says exact.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from typing import Callable, Optional

from . import explicit
from .approx import ApproxParams, build_xs, optimality_experiment, xs_bound_checks
from .democracy import (
    cghm_construct,
    condition71_check,
    demfun_bruteforce,
    demfun_dp,
    demfun_table,
    doubling_scan,
    one_plus_log2,
    sqrt_of,
)
from .errors import TruncationError
from .greedy import gamma, sigma_exact, sigma_oracle_grid, sigma_power_table
from .errorseq import TwoPoolErrorSequence, TwoPoolParams
from .schedule import arithmetic_schedule, squares_schedule
from .spaces import SpaceSpec


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    budget_seconds: float = 0.0


def criterion_1() -> tuple[bool, str]:
    """Democracy oracle equivalence on the 10-coordinate toy space."""
    toy = SpaceSpec.block_sum([(2, 4), (3, 6)])
    for n in range(0, 11):
        point = demfun_dp(toy, n, method="dp")
        hl_b, hr_b = demfun_bruteforce(toy, n)
        if point.hl_power != hl_b or point.hr_power != hr_b:
            return False, f"mismatch at N={n}: dp=({point.hl_power},{point.hr_power}) brute=({hl_b},{hr_b})"
    return True, "demfun_dp == demfun_bruteforce for all N in [0,10]"


def criterion_2() -> tuple[bool, str]:
    """Non-doubling reproduction on a = (4,5,6,7), k = 1, 2."""
    sched = arithmetic_schedule(3)
    spec = SpaceSpec.from_schedule(sched)
    expected = {20: 4, 40: 20, 120: 20, 240: 120}
    for n, want in expected.items():
        got = demfun_dp(spec, n, method="dp", which="hl").hl_power
        if got != want:
            return False, f"h_l({n})^2 = {got}, expected {want}"
    report = doubling_scan(sched, [1, 2])
    for row in report.rows:
        if not row.bound_holds:
            return False, f"k={row.k}: ratio_sq {row.ratio_sq} < bound_sq {row.bound_sq}"
        if not row.upper_equality:
            return False, f"k={row.k}: h_l(n_k+1)^2 = {row.hl_n_power} != n_k = {row.n_k}"
    return True, "h_l values exact; ratios beat sqrt(2/3)sqrt(a_(k+1)); upper witness tight"


def criterion_3() -> tuple[bool, str]:
    """h_r(N)^2 = N for N <= 1000, plus the capacity error path."""
    deep = SpaceSpec.from_schedule(arithmetic_schedule(5))  # caps sum to 7704
    for n in range(1, 1001):
        got = demfun_dp(deep, n, method="extreme", which="hr").hr_power
        if got != n:
            return False, f"h_r({n})^2 = {got} != {n}"
    shallow = SpaceSpec.from_schedule(arithmetic_schedule(3))  # caps sum to 144
    try:
        demfun_dp(shallow, 1000, which="hr")
        return False, "shallow window served h_r(1000) instead of refusing"
    except TruncationError:
        pass
    return True, "h_r identity exact on N <= 1000; shallow window refuses"


def criterion_4() -> tuple[bool, str]:
    """sigma_exact vs the free-coefficient grid oracle, 50 instances."""
    rng = random.Random(4)
    spaces = [SpaceSpec.lp(1, 4), SpaceSpec.lp(2, 4), SpaceSpec.trunc_block(2, 4, 2)]
    worst = 0.0
    for i in range(50):
        spec = spaces[i % 3]
        values = [rng.randint(0, 8) * rng.choice((-1, 1)) for _ in range(4)]
        n = rng.randint(0, 4)
        x = explicit.from_explicit(values, spec)
        exact = float(sigma_exact(x, n, spec))
        oracle = sigma_oracle_grid(values, n, spec)
        worst = max(worst, abs(exact - oracle))
        if abs(exact - oracle) > 1e-6:
            return False, f"instance {i}: |{exact} - {oracle}| > 1e-6 ({spec.variant}, N={n})"
    return True, f"50 instances agree; worst |diff| = {worst:.2e}"


def criterion_5() -> tuple[bool, str]:
    """Compressed tie enumeration == raw subset enumeration, 30 instances."""
    rng = random.Random(5)
    done = 0
    while done < 30:
        caps_sizes = [(rng.randint(1, 3), rng.randint(3, 5)) for _ in range(2)]
        spec = SpaceSpec.block_sum(caps_sizes)
        raw = []
        tie_counts = []
        for b, (_cap, size) in enumerate(caps_sizes):
            above = rng.randint(0, 1)
            tie = rng.randint(0, min(4, size - above - 1))
            below = rng.randint(0, size - above - tie)
            if above:
                raw.append((b, rng.randint(3, 5), above))
            if tie:
                raw.append((b, 2, tie))
            if below:
                raw.append((b, 1, below))
            tie_counts.append(tie)
        total_tie = sum(tie_counts)
        if not 2 <= total_tie <= 8 or min(tie_counts) == 0:
            continue
        x = spec.vector(raw)
        above_total = sum(c for _b, m, c in x.groups if m > 2)
        n = above_total + rng.randint(1, total_tie - 1)
        out = gamma(x, n, spec)
        vals = explicit.to_explicit(x, spec, rng)
        hi, lo = explicit.gamma_raw(vals, n, spec)
        if out.residual_max.power_exact != hi or out.residual_min.power_exact != lo:
            return False, (
                f"instance {done}: compressed ({out.residual_max.power_exact},"
                f"{out.residual_min.power_exact}) != raw ({hi},{lo})"
            )
        done += 1
    return True, "30 tied instances match the raw enumeration exactly"


def criterion_6() -> tuple[bool, str]:
    """gamma == sigma exactly in l_p for tie-free integer vectors."""
    rng = random.Random(6)
    for p in (1, 2, 3):
        for _ in range(100):
            dim = rng.randint(2, 6)
            spec = SpaceSpec.lp(p, dim)
            mags = rng.sample(range(1, 100), dim)
            x = spec.vector([(0, m, 1) for m in mags])
            table = sigma_power_table(x, spec)
            for n in range(dim + 1):
                out = gamma(x, n, spec)
                s_pow = table[n] if n < len(table) else 0
                if out.residual_max.power_exact != s_pow:
                    return False, f"p={p}, N={n}: gamma {out.residual_max.power_exact} != sigma {s_pow}"
                if not out.tie.empty:
                    return False, f"p={p}: unexpected tie on distinct magnitudes"
    return True, "gamma_N == sigma_N exactly for p in {1,2,3}, 100 vectors each, all N"


def criterion_7() -> tuple[bool, str]:
    """CGHM constructor on h_l = 1 + log2, h_r = sqrt."""
    seqs = cghm_construct(sqrt_of, one_plus_log2, c_doubling=2.0, alpha=0.25, count=5)
    if len(seqs.w) < 5 or seqs.exhausted:
        return False, f"only {len(seqs.w)} terms (exhausted={seqs.exhausted})"
    if not seqs.all_checks_pass():
        return False, f"internal chain checks failed: {seqs.checks}"
    report = condition71_check(sqrt_of, one_plus_log2, seqs.pairs, c=1.0, alpha=0.25)
    if not report.all_pass:
        return False, f"7.1 check failed: {report.rows}"
    return True, f"5 terms constructed (w={seqs.w}); 7.1 holds with C=1"


def criterion_8() -> tuple[bool, str]:
    """x_s inequality chain for s = 2, 3, 4 on a_j = (j+1)^2, all exact."""
    sched = squares_schedule(4)
    for s in (2, 3, 4):
        xs = build_xs(sched, s)  # raises if any build-time invariant fails
        checks = dict(xs.checks)
        checks.update(xs_bound_checks(xs))
        bad = [name for name, ok in checks.items() if not ok]
        if bad:
            return False, f"s={s}: failed checks {bad}"
    return True, "LS1-LS3, the democracy jump and the gamma lower bound hold exactly"


def criterion_9() -> tuple[bool, str]:
    """Optimality collapse: normalized ratio stable, raw ratio decreasing."""
    sched = squares_schedule(4)
    params = [ApproxParams(1, 1), ApproxParams(0.5, 2), ApproxParams(1, math.inf)]
    report = optimality_experiment(sched, [2, 3, 4], params)
    by_params: dict[tuple, list] = {}
    for run in report.runs:
        by_params.setdefault((run.alpha, run.q), []).append(run)
    for key, runs in by_params.items():
        runs.sort(key=lambda r: r.s)
        base = runs[0].normalized
        for run in runs:
            if not (0.5 * base <= run.normalized <= 2.0 * base):
                return False, f"{key}: normalized {run.normalized} outside factor 2 of {base}"
        ratios = [r.ratio for r in runs]
        if not all(a > b for a, b in zip(ratios, ratios[1:])):
            return False, f"{key}: raw ratios not strictly decreasing: {ratios}"
    return True, "normalized ratios within factor 2 of s=2; raw ratios strictly decreasing"


def criterion_10() -> tuple[bool, str]:
    """Closed-form error sequences == generic DP on shrunken two-pool vectors."""
    cases = [
        (squares_schedule(2), 36, 4, 36),  # H, cap, V
        (arithmetic_schedule(2), 20, 4, 20),
    ]
    for sched, h, cap, v in cases:
        spec = SpaceSpec.from_schedule(sched)
        x = spec.vector([(0, 2, h), (1, 1, v)])
        closed_sigma = TwoPoolErrorSequence("sigma", TwoPoolParams(4, 1, h, cap, v))
        closed_gamma = TwoPoolErrorSequence("gamma", TwoPoolParams(4, 1, h, cap, v))
        dp = sigma_power_table(x, spec)
        for k in range(h + v + 1):
            if closed_sigma.power(k) != dp[k]:
                return False, f"{sched.a}: sigma mismatch at k={k}"
            got = gamma(x, k, spec).residual_max.power_exact
            if closed_gamma.power(k) != got:
                return False, f"{sched.a}: gamma mismatch at k={k}"
    return True, "closed forms equal the removal-count DP for every k on both instances"


def criterion_11() -> tuple[bool, str]:
    """h_l is stable under adding one more block, for all N <= n_(K+1)."""
    cases = [
        (arithmetic_schedule(2), arithmetic_schedule(3)),
        (squares_schedule(1), squares_schedule(2)),
    ]
    for small, big in cases:
        spec_small = SpaceSpec.from_schedule(small)
        spec_big = SpaceSpec.from_schedule(big)
        max_n = max(b.size for b in spec_small.blocks)
        t_small = demfun_table(spec_small, max_n, which="hl")
        t_big = demfun_table(spec_big, max_n, which="hl")
        for n in range(max_n + 1):
            if t_small.hl_power(n) != t_big.hl_power(n):
                return False, (
                    f"a={small.a}: h_l({n})^2 changed {t_small.hl_power(n)} -> "
                    f"{t_big.hl_power(n)} with one more block"
                )
    return True, "h_l identical with K and K+1 blocks on both schedules"


CRITERIA: list[tuple[int, str, Callable[[], tuple[bool, str]], float]] = [
    (1, "democracy oracle equivalence (toy space)", criterion_1, 1.0),
    (2, "non-doubling h_l reproduction, a=(4,5,6,7)", criterion_2, 1.0),
    (3, "h_r(N)^2 = N identity and capacity check", criterion_3, 1.0),
    (4, "sigma reduction vs grid oracle", criterion_4, 30.0),
    (5, "tie semantics vs raw enumeration", criterion_5, 10.0),
    (6, "greedy basis sanity in l_p", criterion_6, 10.0),
    (7, "CGHM constructor and 7.1 check", criterion_7, 1.0),
    (8, "x_s inequality chain, s in {2,3,4}", criterion_8, 60.0),
    (9, "optimality collapse (LS5/LS6)", criterion_9, 60.0),
    (10, "closed-form vs DP error sequences", criterion_10, 10.0),
    (11, "truncation stability of h_l", criterion_11, 5.0),
]


def run_all(only: Optional[list[int]] = None, stream=None) -> list[CheckResult]:
    results = []
    for number, name, func, budget in CRITERIA:
        if only is not None and number not in only:
            continue
        start = time.perf_counter()
        try:
            passed, detail = func()
        except Exception as exc:  # a crash is a failure, not an abort
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - start
        result = CheckResult(number, name, passed, detail, elapsed, budget)
        results.append(result)
        if stream is not None:
            status = "PASS" if result.passed else "FAIL"
            stream.write(
                f"[{status}] criterion {number}: {name} ({elapsed:.2f}s) - {detail}\n"
            )
    return results
