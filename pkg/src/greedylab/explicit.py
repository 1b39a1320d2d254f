"""Explicit-coordinate oracle backend.

Everything here works on a flat list of (possibly signed) coordinate values
over a small finite universe and answers by raw enumeration.  It exists to
cross-check the compressed implementations: same quantities, independent
route.  Deliberately unoptimized.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Sequence

from .errors import OracleUnavailableError
from .exact import as_fraction, pow_rational, simplify
from .spaces import SpaceSpec
from .vectors import CompressedVector, canonicalize


def block_offsets(spec: SpaceSpec) -> list[int]:
    """Start offset of each block in the flat layout (finite spaces only)."""
    offsets = []
    pos = 0
    for b in spec.blocks:
        if b.size is None:
            raise ValueError("explicit backend needs finite block sizes")
        offsets.append(pos)
        pos += b.size
    return offsets


def dimension(spec: SpaceSpec) -> int:
    dim = spec.dimension()
    if dim is None:
        raise ValueError("explicit backend needs a finite-dimensional space")
    return dim


def block_of_index(spec: SpaceSpec, idx: int) -> int:
    offsets = block_offsets(spec)
    for b in range(len(offsets) - 1, -1, -1):
        if idx >= offsets[b]:
            return b
    raise IndexError(idx)


def to_explicit(
    x: CompressedVector, spec: SpaceSpec, rng=None
) -> list[Fraction]:
    """Lay a compressed vector out as explicit coordinates.

    With an rng, coordinates are shuffled within their block and given
    random signs; all norms must be blind to both.
    """
    offsets = block_offsets(spec)
    values = [Fraction(0)] * dimension(spec)
    for b in x.blocks():
        size = spec.blocks[b].size
        slots = list(range(size))
        if rng is not None:
            rng.shuffle(slots)
        pos = 0
        for mag, count in x.block_groups(b):
            for _ in range(count):
                sign = 1 if rng is None or rng.random() < 0.5 else -1
                values[offsets[b] + slots[pos]] = mag * sign
                pos += 1
    return values


def from_explicit(values: Sequence, spec: SpaceSpec) -> CompressedVector:
    offsets = block_offsets(spec)
    raw = []
    for b, off in enumerate(offsets):
        for slot in range(spec.blocks[b].size):
            v = as_fraction(values[off + slot])
            raw.append((b, abs(v), 1))
    return canonicalize(raw, sizes=spec.sizes())


def norm_power(values: Sequence, spec: SpaceSpec):
    """Exact p-th power of the space norm (needs integer inner_p == outer_p)."""
    if spec.inner_p != spec.outer_p or not isinstance(spec.inner_p, int):
        raise ValueError("exact explicit norm needs integer inner_p == outer_p")
    p = spec.inner_p
    offsets = block_offsets(spec)
    total = 0
    for b, block in enumerate(spec.blocks):
        mags = sorted(
            (abs(as_fraction(values[offsets[b] + j])) for j in range(block.size)),
            reverse=True,
        )
        total += sum(pow_rational(m, p) for m in mags[: block.cap])
    return simplify(total)


def norm_float(values: Sequence, spec: SpaceSpec) -> float:
    """Float space norm for arbitrary exponents (used by the grid oracle)."""
    inner, outer = spec.inner_p, spec.outer_p
    offsets = block_offsets(spec)
    total = 0.0
    for b, block in enumerate(spec.blocks):
        mags = sorted(
            (abs(float(values[offsets[b] + j])) for j in range(block.size)),
            reverse=True,
        )
        bp = 0.0
        for m in mags[: block.cap]:
            bp += m**inner
        total += bp ** (outer / inner) if bp > 0 else 0.0
    return total ** (1.0 / outer)


def demfun_bruteforce(spec: SpaceSpec, n: int, max_dim: int = 20):
    """Exact (h_l^p, h_r^p) by enumerating every index set of size n."""
    dim = dimension(spec)
    if dim > max_dim:
        raise OracleUnavailableError(f"universe {dim} exceeds brute-force limit {max_dim}")
    if not 0 <= n <= dim:
        raise ValueError(f"need 0 <= n <= {dim}")
    if n == 0:
        return 0, 0
    lo = hi = None
    values = [Fraction(0)] * dim
    for subset in itertools.combinations(range(dim), n):
        for i in subset:
            values[i] = Fraction(1)
        power = norm_power(values, spec)
        for i in subset:
            values[i] = Fraction(0)
        lo = power if lo is None or power < lo else lo
        hi = power if hi is None or power > hi else hi
    return lo, hi


def gamma_raw(values: Sequence, n: int, spec: SpaceSpec):
    """(max, min) residual norm power over every valid greedy keep-set.

    A keep-set is valid iff it contains all coordinates strictly above the
    threshold magnitude and fills up with any coordinates at the threshold.
    """
    vals = [as_fraction(v) for v in values]
    dim = len(vals)
    if n >= dim:
        return 0, 0
    if n == 0:
        power = norm_power(vals, spec)
        return power, power
    order = sorted(range(dim), key=lambda i: abs(vals[i]), reverse=True)
    threshold = abs(vals[order[n - 1]])
    forced = [i for i in range(dim) if abs(vals[i]) > threshold]
    tied = [i for i in range(dim) if abs(vals[i]) == threshold]
    need = n - len(forced)
    best_hi = best_lo = None
    for chosen in itertools.combinations(tied, need):
        kept = set(forced) | set(chosen)
        residual = [Fraction(0) if i in kept else vals[i] for i in range(dim)]
        power = norm_power(residual, spec)
        best_hi = power if best_hi is None or power > best_hi else best_hi
        best_lo = power if best_lo is None or power < best_lo else best_lo
    return best_hi, best_lo


def sigma_removals_bruteforce(values: Sequence, n: int, spec: SpaceSpec):
    """Best n-term error power, minimizing over all removal sets exactly."""
    vals = [as_fraction(v) for v in values]
    support = [i for i, v in enumerate(vals) if v != 0]
    if n >= len(support):
        return 0
    if n == 0:
        return norm_power(vals, spec)
    best = None
    for removed in itertools.combinations(support, n):
        residual = list(vals)
        for i in removed:
            residual[i] = Fraction(0)
        power = norm_power(residual, spec)
        best = power if best is None or power < best else best
    return best
