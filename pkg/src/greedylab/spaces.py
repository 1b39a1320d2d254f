"""Norm evaluators: l_p, truncated block spaces, and their direct sums.

The truncated block space with parameters (cap n, size N, p) is the
N-dimensional space whose norm is the l_p norm of the n largest coefficient
magnitudes.  A block sum combines such blocks with an outer l_p exponent.
Whenever the exponents are integers and the coefficients rational, norms are
carried as exact p-th powers next to the float; every inequality the test
suite asserts compares the exact powers.

An independent sup-form oracle (the supremum over small index sets paired
with unit-ball weight sequences) cross-checks the top-n evaluation for p=2.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .errors import OracleUnavailableError
from .exact import as_fraction, pow_rational, rel_close, simplify
from .schedule import BlockSchedule
from .vectors import CompressedVector, canonicalize, indicator

Rational = Union[int, Fraction]


@dataclass(frozen=True)
class Block:
    cap: Optional[int]  # how many top magnitudes the block norm sees
    size: Optional[int]  # dimension of the block; None = unbounded

    def __post_init__(self):
        if self.cap is not None and self.cap < 1:
            raise ValueError("block cap must be >= 1")
        if self.size is not None:
            if self.size < 1:
                raise ValueError("block size must be >= 1")
            if self.cap is not None and self.cap > self.size:
                raise ValueError("block cap cannot exceed block size")


@dataclass(frozen=True)
class SpaceSpec:
    variant: str  # "lp" | "trunc_block" | "block_sum"
    blocks: tuple[Block, ...]
    inner_p: int | float = 2
    outer_p: int | float = 2
    schedule: Optional[BlockSchedule] = None

    @staticmethod
    def lp(p: int | float, dim: Optional[int] = None) -> "SpaceSpec":
        p = _normalize_p(p)
        return SpaceSpec("lp", (Block(dim, dim),), inner_p=p, outer_p=p)

    @staticmethod
    def trunc_block(cap: int, size: int, p: int | float = 2) -> "SpaceSpec":
        p = _normalize_p(p)
        return SpaceSpec("trunc_block", (Block(cap, size),), inner_p=p, outer_p=p)

    @staticmethod
    def block_sum(
        blocks: Iterable[tuple[int, int]],
        inner_p: int | float = 2,
        outer_p: int | float = 2,
    ) -> "SpaceSpec":
        blk = tuple(Block(c, s) for c, s in blocks)
        if not blk:
            raise ValueError("block sum needs at least one block")
        return SpaceSpec("block_sum", blk, _normalize_p(inner_p), _normalize_p(outer_p))

    @staticmethod
    def from_schedule(schedule: BlockSchedule) -> "SpaceSpec":
        blocks = tuple(
            Block(schedule.cap(i), schedule.size(i)) for i in range(schedule.num_blocks)
        )
        return SpaceSpec(
            "block_sum",
            blocks,
            _normalize_p(schedule.inner_p),
            _normalize_p(schedule.outer_p),
            schedule=schedule,
        )

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def sizes(self) -> list[Optional[int]]:
        return [b.size for b in self.blocks]

    def caps(self) -> list[Optional[int]]:
        return [b.cap for b in self.blocks]

    def dimension(self) -> Optional[int]:
        total = 0
        for b in self.blocks:
            if b.size is None:
                return None
            total += b.size
        return total

    def vector(self, raw) -> CompressedVector:
        """Canonicalize raw groups with this space's capacity checks."""
        return canonicalize(raw, sizes=self.sizes())

    def indicator(self, block_counts) -> CompressedVector:
        return indicator(block_counts, sizes=self.sizes())

    def to_json(self) -> dict:
        if self.schedule is not None:
            return self.schedule.to_json()
        if self.variant == "lp":
            return {"lp": self.inner_p, "dim": self.blocks[0].size}
        if self.variant == "trunc_block":
            b = self.blocks[0]
            return {"cap": b.cap, "size": b.size, "p": self.inner_p}
        return {
            "blocks": [[b.cap, b.size] for b in self.blocks],
            "inner_p": self.inner_p,
            "outer_p": self.outer_p,
        }


def space_from_json(obj: dict) -> SpaceSpec:
    """Accept any of the documented space/schedule JSON shapes."""
    if "schedule" in obj:
        obj = obj["schedule"]
    if "a" in obj:
        return SpaceSpec.from_schedule(BlockSchedule.from_json(obj))
    if "lp" in obj:
        return SpaceSpec.lp(obj["lp"], obj.get("dim"))
    if "cap" in obj and "size" in obj:
        return SpaceSpec.trunc_block(obj["cap"], obj["size"], obj.get("p", 2))
    if "blocks" in obj:
        return SpaceSpec.block_sum(
            [tuple(b) for b in obj["blocks"]],
            obj.get("inner_p", 2),
            obj.get("outer_p", 2),
        )
    raise ValueError("unrecognized space JSON (need 'a', 'lp', 'cap'/'size' or 'blocks')")


def _normalize_p(p: int | float) -> int | float:
    if isinstance(p, float) and p.is_integer():
        p = int(p)
    if p < 1:
        raise ValueError("exponent p must satisfy p >= 1")
    return p


# ---------------------------------------------------------------------------
# Norm values


@dataclass(frozen=True)
class NormValue:
    """A norm carried as float plus (when available) its exact p-th power."""

    value: float
    power_exact: Optional[Rational]
    p: int | float

    @staticmethod
    def from_power(power: Rational, p: int | float) -> "NormValue":
        power = simplify(power)
        if power < 0:
            raise ValueError("norm power cannot be negative")
        if p == 2:
            value = math.sqrt(float(power))
        else:
            value = float(power) ** (1.0 / p)
        return NormValue(value, power, p)

    @staticmethod
    def from_float(value: float, p: int | float) -> "NormValue":
        return NormValue(value, None, p)

    @property
    def squared_exact(self) -> Optional[Rational]:
        return self.power_exact if self.p == 2 else None

    def is_exact(self) -> bool:
        return self.power_exact is not None

    def eq(self, other: "NormValue", rel: float = 1e-9) -> bool:
        if self.is_exact() and other.is_exact() and self.p == other.p:
            return self.power_exact == other.power_exact
        return rel_close(self.value, other.value, rel)

    def le(self, other: "NormValue", rel: float = 1e-9) -> bool:
        if self.is_exact() and other.is_exact() and self.p == other.p:
            return self.power_exact <= other.power_exact
        return self.value <= other.value + rel * max(abs(self.value), abs(other.value), 1.0)

    def __float__(self) -> float:
        return self.value


ZERO_NORM = NormValue(0.0, 0, 2)


# ---------------------------------------------------------------------------
# Block and space norms


def _group_power(
    groups: Sequence[tuple[Fraction, int]], cap: Optional[int], p: int | float
) -> Rational | float:
    """p-th power of the block norm from (magnitude, multiplicity) groups.

    groups must be sorted by descending magnitude.  Exact when p is an
    integer, float otherwise.
    """
    take_total = sum(c for _, c in groups) if cap is None else cap
    exact = isinstance(p, int)
    total: Rational | float = 0 if exact else 0.0
    remaining = take_total
    for mag, count in groups:
        if remaining <= 0:
            break
        take = min(count, remaining)
        if exact:
            total += pow_rational(mag, p) * take
        else:
            total += float(mag) ** p * take
        remaining -= take
    return simplify(total) if exact else total


def trunc_block_norm(
    magnitudes: Iterable[Rational], cap: int, p: int | float = 2
) -> NormValue:
    """l_p norm of the ``cap`` largest magnitudes of a flat coefficient list.

    For an indicator input with m ones this is min(m, cap)^(1/p), which is
    exactly the two-case formula defining the truncated block space.
    """
    mags = sorted((as_fraction(abs(m)) for m in magnitudes), reverse=True)
    groups = [(m, 1) for m in mags if m != 0]
    power = _group_power(groups, cap, _normalize_p(p))
    if isinstance(power, float):
        return NormValue(power ** (1.0 / p), None, p)
    return NormValue.from_power(power, p)


def space_norm(x: CompressedVector, spec: SpaceSpec) -> NormValue:
    """Norm of a compressed vector in the given space.

    Block sums combine per-block norms with the outer exponent; the result
    stays exact whenever outer_p == inner_p is an integer.
    """
    # Re-canonicalizing through the spec applies the capacity checks.
    x = spec.vector(x.groups)
    if x.is_zero:
        return NormValue.from_power(0, spec.outer_p)

    inner, outer = spec.inner_p, spec.outer_p
    block_powers = []
    for b in x.blocks():
        block = spec.blocks[b]
        block_powers.append(_group_power(x.block_groups(b), block.cap, inner))

    if inner == outer and all(not isinstance(bp, float) for bp in block_powers):
        return NormValue.from_power(sum(block_powers), outer)

    total = 0.0
    for bp in block_powers:
        bv = float(bp) ** (1.0 / inner)
        total += bv**outer
    return NormValue(total ** (1.0 / outer), None, outer)


def sup_form_norm_oracle(
    coords: Sequence[Rational], cap: int, max_support: int = 25
) -> NormValue:
    """Independent p=2 oracle: sup over index sets of size <= cap.

    For each subset G the inner supremum over weight sequences in the l_2
    unit ball is attained at the normalized restriction, i.e. it equals the
    l_2 norm of the restricted vector; so only the subsets are enumerated.
    Feasible only for small supports, by design.
    """
    if len(coords) > 2**20:
        raise OracleUnavailableError("universe too large for the sup-form oracle")
    values = [as_fraction(abs(c)) for c in coords]
    support = [i for i, v in enumerate(values) if v != 0]
    if len(support) > max_support:
        raise OracleUnavailableError(
            f"support {len(support)} exceeds oracle limit {max_support}"
        )
    take = min(cap, len(support))
    best: Rational = 0
    for subset in itertools.combinations(support, take):
        power = sum(values[i] ** 2 for i in subset)
        if power > best:
            best = power
    return NormValue.from_power(best, 2)


# ---------------------------------------------------------------------------
# Random instances and the lattice property check


def random_vector(
    spec: SpaceSpec,
    rng: random.Random,
    max_groups_per_block: int = 3,
    max_mag: int = 8,
    max_count: int = 4,
) -> CompressedVector:
    """Small random canonical vector that respects the space's capacities."""
    raw = []
    for b, block in enumerate(spec.blocks):
        room = block.size if block.size is not None else max_count * max_groups_per_block
        for _ in range(rng.randint(0, max_groups_per_block)):
            if room <= 0:
                break
            count = rng.randint(1, min(max_count, room))
            mag = Fraction(rng.randint(0, max_mag * 4), 4)
            raw.append((b, mag, count))
            room -= count
    return spec.vector(raw)


@dataclass
class LatticeReport:
    passed: bool
    trials: int
    failures: list = field(default_factory=list)


def lattice_check(spec: SpaceSpec, trials: int = 200, seed: int = 0) -> LatticeReport:
    """Property-check the lattice inequality and basis normalization.

    For random x and random per-coordinate factors |lambda| <= 1 the norm
    must not increase; every basis vector must have norm exactly 1.  All
    comparisons are exact (rational magnitudes, integer exponents).
    """
    rng = random.Random(seed)
    report = LatticeReport(passed=True, trials=trials)

    for b in range(spec.num_blocks):
        e = spec.indicator({b: 1})
        nv = space_norm(e, spec)
        if nv.power_exact != 1:
            report.passed = False
            report.failures.append({"kind": "normalization", "block": b, "norm": nv.value})

    for t in range(trials):
        x = random_vector(spec, rng)
        if x.is_zero:
            continue
        # Split groups so different coordinates get different shrink factors.
        raw = []
        for b, mag, count in x.groups:
            left = count
            while left > 0:
                part = rng.randint(1, left)
                lam = Fraction(rng.randint(0, 16), 16)
                raw.append((b, mag * lam, part))
                left -= part
        y = spec.vector(raw)
        nx, ny = space_norm(x, spec), space_norm(y, spec)
        ok = (
            ny.power_exact <= nx.power_exact
            if nx.is_exact() and ny.is_exact()
            else ny.value <= nx.value * (1 + 1e-9)
        )
        if not ok:
            report.passed = False
            report.failures.append(
                {"kind": "lattice", "trial": t, "x": x.to_json(), "y": y.to_json()}
            )
    return report
