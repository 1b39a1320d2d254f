"""Approximation-space quasi-norms and the two-pool counterexample.

The quasi-norm of order (alpha, q) built from an error sequence e_N is
||x|| + [sum_N (N^alpha e_N)^q / N]^(1/q), with the sup form at q = inf.
Using sigma_N gives the approximation-space quasi-norm, gamma_N the
greedy-class quasi-norm; the two-pool vector x_s makes their ratio
collapse like (s^(-q alpha/2) + s^(-q/2))^(1/q), which is the
non-optimality phenomenon reproduced by optimality_experiment.

Series are finite (errors vanish at the support size) and summed with
math.fsum, so accumulation order cannot move the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .errors import GreedyLabError, ScheduleTooShallowError, TermBudgetError
from .errorseq import ErrorSequence, TwoPoolErrorSequence, TwoPoolParams
from .exact import sqrt_plus_const_ge
from .greedy import error_sequence, DEFAULT_TIE_BUDGET
from .schedule import BlockSchedule
from .spaces import SpaceSpec, space_norm
from .vectors import CompressedVector
from . import democracy

DEFAULT_TERM_BUDGET = 10**8


@dataclass(frozen=True)
class ApproxParams:
    """Rate weight alpha > 0 and Lorentz-type exponent q (math.inf allowed)."""

    alpha: float
    q: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not (self.q > 0 or math.isinf(self.q)):
            raise ValueError("q must be positive or infinity")

    @property
    def q_label(self) -> Union[float, str]:
        return "inf" if math.isinf(self.q) else self.q


def quasinorm(
    norm_x: float,
    seq: ErrorSequence,
    params: ApproxParams,
    term_budget: int = DEFAULT_TERM_BUDGET,
) -> float:
    """Evaluate the quasi-norm from a precomputed error sequence."""
    support = seq.support_size
    if support > term_budget:
        raise TermBudgetError(
            f"{support} terms exceed the budget of {term_budget}; "
            "use quasinorm_bounds for a bracketing bound instead"
        )
    alpha, q, p = params.alpha, params.q, seq.p
    if math.isinf(q):
        best = 0.0
        for k in range(1, support + 1):
            power = seq.power(k)
            if power == 0:
                continue
            best = max(best, k**alpha * float(power) ** (1.0 / p))
        return norm_x + best
    e1 = q * alpha - 1.0
    e2 = q / p
    terms = []
    for k in range(1, support + 1):
        power = seq.power(k)
        if power == 0:
            continue
        terms.append(k**e1 * float(power) ** e2)
    return norm_x + math.fsum(terms) ** (1.0 / q)


def quasinorm_bounds(
    norm_x: float,
    seq: ErrorSequence,
    params: ApproxParams,
    subranges_per_piece: int = 2048,
) -> tuple[float, float]:
    """Bracket the quasi-norm without touching every term.

    Works on sequences with piecewise-linear exact powers (the two-pool
    closed forms).  Each term profile k -> k^(q alpha - 1) * power(k)^(q/p)
    is monotone or unimodal on a piece, so per subrange the sum is squeezed
    between length * min(endpoint values) and length * max(endpoints, peak).
    Results are bounds and are reported as such, never as values; a 1e-9
    relative margin absorbs float rounding of the envelope sums themselves.
    """
    if not isinstance(seq, TwoPoolErrorSequence):
        value = quasinorm(norm_x, seq, params)
        return value, value
    alpha, q, p = params.alpha, params.q, seq.p
    pieces = seq.pieces()

    def profile(k: int, a0, a1) -> float:
        power = float(a0 + a1 * k)
        if power <= 0:
            return 0.0
        if math.isinf(q):
            return k**alpha * power ** (1.0 / p)
        return k ** (q * alpha - 1.0) * power ** (q / p)

    if math.isinf(q):
        sup = 0.0
        for lo, hi, a0, a1 in pieces:
            lo = max(lo, 1)
            if lo > hi:
                continue
            peak = _ternary_argmax(lambda k: profile(k, a0, a1), lo, hi)
            sup = max(sup, profile(peak, a0, a1))
        return norm_x + sup, norm_x + sup

    lo_total = 0.0
    hi_total = 0.0
    for lo, hi, a0, a1 in pieces:
        lo = max(lo, 1)
        if lo > hi:
            continue
        f = lambda k: profile(k, a0, a1)
        peak = _ternary_argmax(f, lo, hi)
        cuts = _split_range(lo, hi, subranges_per_piece)
        for u, w in cuts:
            fu, fw = f(u), f(w)
            length = w - u + 1
            fmax = max(fu, fw, f(peak)) if u <= peak <= w else max(fu, fw)
            lo_total += length * min(fu, fw)
            hi_total += length * fmax
    return (
        norm_x + lo_total ** (1.0 / q) * (1 - 1e-9),
        norm_x + hi_total ** (1.0 / q) * (1 + 1e-9),
    )


def _ternary_argmax(f, lo: int, hi: int) -> int:
    while hi - lo > 2:
        m1 = lo + (hi - lo) // 3
        m2 = hi - (hi - lo) // 3
        if f(m1) < f(m2):
            lo = m1 + 1
        else:
            hi = m2
    return max(range(lo, hi + 1), key=f)


def _split_range(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    length = hi - lo + 1
    parts = min(parts, length)
    out = []
    start = lo
    for i in range(parts):
        end = lo + (length * (i + 1)) // parts - 1
        if end >= start:
            out.append((start, end))
            start = end + 1
    return out


def approx_quasinorm(
    x: CompressedVector,
    spec: SpaceSpec,
    params: ApproxParams,
    errors: Optional[ErrorSequence] = None,
    term_budget: int = DEFAULT_TERM_BUDGET,
) -> float:
    """Approximation-space quasi-norm of x (sigma-based)."""
    if errors is None:
        errors = error_sequence(x, spec, "sigma")
    if errors.kind != "sigma":
        raise ValueError("approx_quasinorm needs a sigma sequence")
    return quasinorm(float(space_norm(x, spec)), errors, params, term_budget)


def greedy_quasinorm(
    x: CompressedVector,
    spec: SpaceSpec,
    params: ApproxParams,
    errors: Optional[ErrorSequence] = None,
    term_budget: int = DEFAULT_TERM_BUDGET,
    tie_budget: int = DEFAULT_TIE_BUDGET,
) -> float:
    """Greedy-class quasi-norm of x (gamma-based, worst-case ties)."""
    if errors is None:
        errors = error_sequence(x, spec, "gamma", tie_budget)
    if errors.kind != "gamma":
        raise ValueError("greedy_quasinorm needs a gamma sequence")
    return quasinorm(float(space_norm(x, spec)), errors, params, term_budget)


# ---------------------------------------------------------------------------
# The x_s construction


@dataclass(frozen=True)
class XsConstruction:
    """Two-magnitude counterexample vector over a block schedule.

    Magnitude 2 fills block ``hi_block`` entirely (n_s coordinates, the
    near-minimal-democracy set); magnitude 1 sits on v = ceil(n_s / r)
    coordinates of the next block, r = floor(sqrt(s)).  All defining
    inequalities are verified exactly at build time.
    """

    s: int
    hi_block: int  # 0-based (the 1-based convention elsewhere is hi_block + 1)
    n_s: int
    c: int  # cap of the hi block = ||M_s||^2
    r: int
    v: int  # = ||V^s||^2
    schedule: BlockSchedule
    spec: SpaceSpec
    x: CompressedVector
    checks: dict = field(default_factory=dict)

    @property
    def support_size(self) -> int:
        return self.n_s + self.v

    def sigma_sequence(self) -> TwoPoolErrorSequence:
        return TwoPoolErrorSequence("sigma", self._params())

    def gamma_sequence(self) -> TwoPoolErrorSequence:
        return TwoPoolErrorSequence("gamma", self._params())

    def _params(self) -> TwoPoolParams:
        return TwoPoolParams(g=4, l=1, count_hi=self.n_s, cap_hi=self.c,
                             count_lo=self.v, p=2)


def build_xs(schedule: BlockSchedule, s: int) -> XsConstruction:
    """Build and exactly verify the x_s vector for democracy-jump level s.

    Needs a block whose next multiplier is at least (s+1)^2 followed by a
    materialized successor block; raises ScheduleTooShallowError otherwise.
    """
    if s < 2:
        raise ValueError("s must be >= 2")
    if schedule.inner_p != 2 or schedule.outer_p != 2:
        raise ValueError("the x_s construction is defined for p = 2")
    target = (s + 1) ** 2
    hi_block = None
    for i in range(schedule.num_blocks - 1):
        if schedule.a[i + 1] >= target:
            hi_block = i
            break
    if hi_block is None:
        raise ScheduleTooShallowError(
            f"schedule too shallow for s={s}: no materialized block with "
            f"next multiplier >= {target} and a materialized successor"
        )

    spec = SpaceSpec.from_schedule(schedule)
    n_s = schedule.size(hi_block)
    c = schedule.cap(hi_block)
    r = math.isqrt(s)
    v = -(-n_s // r)  # ceil
    x = spec.vector([(hi_block, 2, n_s), (hi_block + 1, 1, v)])

    hl_ns = democracy.demfun_dp(spec, n_s, which="hl").hl_power
    hl_2ns = democracy.demfun_dp(spec, 2 * n_s, which="hl").hl_power
    m_power = space_norm(spec.indicator({hi_block: n_s}), spec).power_exact
    v_power = space_norm(spec.indicator({hi_block + 1: v}), spec).power_exact
    xs_power = space_norm(x, spec).power_exact

    checks = {
        # ||M_s|| equals h_l(n_s) with zero slack (full-block realization).
        "m_is_hl_minimizer": m_power == hl_ns == c,
        "v_norm_power": v_power == v,
        # Defining jump: h_l(2 n_s) >= (s+1) h_l(n_s), compared on squares.
        "democracy_jump": hl_2ns >= (s + 1) ** 2 * hl_ns,
        # (LS1): r sqrt(v) + 1 >= s sqrt(c).
        "ls1": sqrt_plus_const_ge(r, v, 1, s, c),
        # ||x_s||^2 = 4c + v <= 9v and the support fits in 2 #M_s.
        "xs_norm_power": xs_power == 4 * c + v,
        "xs_norm_le_3v": 4 * c + v <= 9 * v,
        "support_le_2ms": n_s + v <= 2 * n_s,
    }
    if not all(checks.values()):
        failed = [name for name, ok in checks.items() if not ok]
        raise GreedyLabError(f"x_s invariants failed at build time: {failed}")
    return XsConstruction(
        s=s, hi_block=hi_block, n_s=n_s, c=c, r=r, v=v,
        schedule=schedule, spec=spec, x=x, checks=checks,
    )


# ---------------------------------------------------------------------------
# The optimality-ratio experiment


def envelope(params: ApproxParams, s: int) -> float:
    """Collapse envelope (s^(-q alpha / 2) + s^(-q/2))^(1/q); max-form at q=inf."""
    if math.isinf(params.q):
        return max(s ** (-params.alpha / 2.0), s**-0.5)
    q = params.q
    return (s ** (-q * params.alpha / 2.0) + s ** (-q / 2.0)) ** (1.0 / q)


@dataclass(frozen=True)
class RatioRun:
    s: int
    alpha: float
    q: float
    a_norm: Optional[float]
    g_norm: Optional[float]
    ratio: Optional[float]
    envelope: float
    normalized: Optional[float]
    checks: dict
    bounded: bool = False
    a_bounds: Optional[tuple[float, float]] = None
    g_bounds: Optional[tuple[float, float]] = None
    ratio_bounds: Optional[tuple[float, float]] = None

    def to_json(self) -> dict:
        out = {
            "s": self.s,
            "alpha": self.alpha,
            "q": "inf" if math.isinf(self.q) else self.q,
            "A": self.a_norm,
            "G": self.g_norm,
            "ratio": self.ratio,
            "envelope": self.envelope,
            "normalized": self.normalized,
            "checks": dict(sorted(self.checks.items())),
        }
        if self.bounded:
            out["bounded"] = True
            out["A_bounds"] = list(self.a_bounds)
            out["G_bounds"] = list(self.g_bounds)
            out["ratio_bounds"] = list(self.ratio_bounds)
        return out


@dataclass(frozen=True)
class RatioReport:
    runs: tuple[RatioRun, ...]

    def to_json(self) -> dict:
        return {"runs": [r.to_json() for r in self.runs]}


def xs_bound_checks(xs: XsConstruction) -> dict:
    """Exact per-k verification of the bounds the collapse argument rests on."""
    sigma = xs.sigma_sequence()
    gamma = xs.gamma_sequence()
    n_s, v, r, s = xs.n_s, xs.v, xs.r, xs.s
    support = xs.support_size
    gamma_lb = all(gamma.power(k) >= v for k in range(1, n_s + 1))
    ls2 = all(sigma.power(k) * s * s <= 9 * r * r * v for k in range(v, support + 1))
    ls3 = all(sigma.power(k) <= 9 * v for k in range(support + 1))
    dominated = all(sigma.power(k) <= gamma.power(k) for k in range(support + 1))
    return {
        "gamma_ge_vs_up_to_ms": gamma_lb,  # gamma_k >= ||V^s|| for k <= #M_s
        "ls2_sigma_tail": ls2,  # sigma_k <= 3 r ||V^s|| / s for k >= #V^s
        "ls3_sigma_all": ls3,  # sigma_k <= 3 ||V^s||
        "sigma_le_gamma": dominated,
    }


def optimality_experiment(
    schedule: BlockSchedule,
    s_values: Sequence[int],
    params_list: Sequence[ApproxParams],
    term_budget: int = DEFAULT_TERM_BUDGET,
    mode: str = "exact",
) -> RatioReport:
    """Quasi-norm ratios of x_s across s and (alpha, q), with bound checks.

    mode="exact" sums every closed-form term and refuses when the count
    exceeds ``term_budget``; mode="bounds" brackets the quasi-norms via
    piecewise envelopes and reports bounds, never values.
    """
    if mode not in ("exact", "bounds"):
        raise ValueError("mode must be 'exact' or 'bounds'")
    runs = []
    for s in s_values:
        xs = build_xs(schedule, s)
        sigma = xs.sigma_sequence()
        gamma = xs.gamma_sequence()
        norm_x = float(space_norm(xs.x, xs.spec))
        checks = dict(xs.checks)
        checks.update(xs_bound_checks(xs))
        for params in params_list:
            env = envelope(params, s)
            if mode == "exact":
                a_norm = quasinorm(norm_x, sigma, params, term_budget)
                g_norm = quasinorm(norm_x, gamma, params, term_budget)
                ratio = a_norm / g_norm
                runs.append(
                    RatioRun(
                        s=s, alpha=params.alpha, q=params.q,
                        a_norm=a_norm, g_norm=g_norm, ratio=ratio,
                        envelope=env, normalized=ratio / env, checks=checks,
                    )
                )
            else:
                a_lo, a_hi = quasinorm_bounds(norm_x, sigma, params)
                g_lo, g_hi = quasinorm_bounds(norm_x, gamma, params)
                runs.append(
                    RatioRun(
                        s=s, alpha=params.alpha, q=params.q,
                        a_norm=None, g_norm=None, ratio=None,
                        envelope=env, normalized=None, checks=checks,
                        bounded=True,
                        a_bounds=(a_lo, a_hi), g_bounds=(g_lo, g_hi),
                        ratio_bounds=(a_lo / g_hi, a_hi / g_lo),
                    )
                )
    return RatioReport(tuple(runs))
