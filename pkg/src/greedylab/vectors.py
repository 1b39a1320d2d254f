"""Compressed coefficient vectors over a block-structured index set.

A finitely supported vector is stored as groups (block, magnitude,
multiplicity).  Magnitudes are exact rationals and multiplicities
arbitrary-precision ints, because the counterexample experiments need
blocks whose sizes dwarf machine words.  Signs are never stored: every
norm in this package is a lattice norm, so only magnitudes matter
(coordinate signs and within-block permutations leave all norms
unchanged).  That convention is exactly what lattice unconditionality
buys, and the test suite checks it against an explicit signed backend
on small instances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .errors import CapacityError
from .exact import as_fraction

# (block id, magnitude, multiplicity); canonical order is by block then
# descending magnitude, so greedy traversal is a merge.
Group = tuple[int, Fraction, int]


@dataclass(frozen=True)
class CompressedVector:
    groups: tuple[Group, ...]

    @property
    def support_size(self) -> int:
        return sum(mult for _, _, mult in self.groups)

    @property
    def is_zero(self) -> bool:
        return not self.groups

    def blocks(self) -> list[int]:
        seen: list[int] = []
        for b, _, _ in self.groups:
            if not seen or seen[-1] != b:
                seen.append(b)
        return seen

    def block_groups(self, block: int) -> list[tuple[Fraction, int]]:
        """Magnitude groups of one block, descending magnitude."""
        return [(m, c) for b, m, c in self.groups if b == block]

    def block_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for b, _, c in self.groups:
            out[b] = out.get(b, 0) + c
        return out

    def magnitudes(self) -> list[tuple[Fraction, int]]:
        """All magnitude groups merged across blocks, descending magnitude."""
        merged: dict[Fraction, int] = {}
        for _, m, c in self.groups:
            merged[m] = merged.get(m, 0) + c
        return sorted(merged.items(), key=lambda t: t[0], reverse=True)

    def scale(self, factor) -> "CompressedVector":
        f = abs(as_fraction(factor))
        return canonicalize((b, m * f, c) for b, m, c in self.groups)

    def to_json(self) -> dict:
        return {"groups": [[b, str(m), str(c)] for b, m, c in self.groups]}

    @staticmethod
    def from_json(obj: dict) -> "CompressedVector":
        return canonicalize((int(b), Fraction(m), int(c)) for b, m, c in obj["groups"])

    @staticmethod
    def load(path: str) -> "CompressedVector":
        with open(path, "r", encoding="utf-8") as fh:
            return CompressedVector.from_json(json.load(fh))


def canonicalize(
    raw: Iterable[tuple[int, object, int]],
    sizes: Optional[Sequence[Optional[int]]] = None,
) -> CompressedVector:
    """Merge, sort and validate raw groups into canonical form.

    Zero magnitudes and zero multiplicities are dropped; identical
    (block, magnitude) pairs merge; groups come out sorted by
    (block, descending magnitude).  Idempotent by construction.  When
    ``sizes`` is given (block id -> block size, None = unbounded), block
    ids are range-checked and per-block support is capacity-checked.
    """
    merged: dict[tuple[int, Fraction], int] = {}
    for block, magnitude, multiplicity in raw:
        block = int(block)
        mult = int(multiplicity)
        mag = as_fraction(magnitude)
        if block < 0:
            raise ValueError(f"negative block id {block}")
        if mag < 0:
            raise ValueError(f"negative magnitude {mag} in block {block}")
        if mult < 0:
            raise ValueError(f"negative multiplicity {mult} in block {block}")
        if mag == 0 or mult == 0:
            continue
        key = (block, mag)
        merged[key] = merged.get(key, 0) + mult

    groups = tuple(
        (b, m, merged[(b, m)])
        for b, m in sorted(merged, key=lambda t: (t[0], -t[1]))
    )
    vec = CompressedVector(groups)

    if sizes is not None:
        for block, count in vec.block_counts().items():
            if block >= len(sizes):
                raise ValueError(f"block id {block} outside the {len(sizes)}-block space")
            size = sizes[block]
            if size is not None and count > size:
                raise CapacityError(block, count, size)
    return vec


def indicator(
    block_counts: Mapping[int, int],
    sizes: Optional[Sequence[Optional[int]]] = None,
) -> CompressedVector:
    """Vector with magnitude 1 on the given number of coordinates per block."""
    return canonicalize(((b, 1, c) for b, c in block_counts.items()), sizes)


@dataclass(frozen=True)
class TieDescriptor:
    """The freedom the greedy operator leaves open at the threshold magnitude.

    ``available`` lists, per block, how many coordinates sit exactly at the
    threshold; ``choose`` of them must be kept (in any combination).
    """

    threshold: Optional[Fraction]
    available: tuple[tuple[int, int], ...]  # (block, count at threshold)
    choose: int

    @property
    def empty(self) -> bool:
        return self.threshold is None

    @property
    def total_available(self) -> int:
        return sum(c for _, c in self.available)


EMPTY_TIE = TieDescriptor(None, (), 0)


def top_magnitudes(
    v: CompressedVector, n: int
) -> tuple[list[tuple[Fraction, int]], TieDescriptor]:
    """Multiset of the N largest magnitudes plus the tie descriptor.

    The kept multiset is well defined even when the kept *set* is not; the
    descriptor records the threshold magnitude, the per-block supply of
    coordinates at that magnitude, and how many of them any valid greedy
    set must take.  Ambiguity exists only when 0 < choose < supply.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    support = v.support_size
    if n == 0:
        return [], EMPTY_TIE
    if n >= support:
        return v.magnitudes(), EMPTY_TIE

    kept: list[tuple[Fraction, int]] = []
    remaining = n
    for mag, count in v.magnitudes():
        if count < remaining:
            kept.append((mag, count))
            remaining -= count
            continue
        kept.append((mag, remaining))
        threshold = mag
        supply = count
        if remaining == supply:
            # The threshold class is consumed entirely: no freedom.
            return kept, EMPTY_TIE
        available = tuple(
            (b, c) for b, m, c in v.groups if m == threshold
        )
        return kept, TieDescriptor(threshold, available, remaining)
    raise AssertionError("unreachable: n < support_size")
