"""
Size reduction, the fundamental domain F(B+) and its exact weight distribution.

TB_p(y) = enc(y_j / p_j) / q with j the first index of Supp(p), where enc is the
canonical integer encoding of gf. A word y lies in F(B+) when, for every i, adding
a nonzero multiple of b_i strictly increases |pi_{b_i+}(y)| + TB_{b_i+}(y).
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Any, Sequence

import numpy as np

from code_basis_reduction.exceptions import UsageError
from code_basis_reduction.linalg import CodeBasis, Word

logger = logging.getLogger(__name__)


def tie_break(p: Word, y: Word) -> Fraction:
    j = p.first_support_index()
    if j is None:
        raise UsageError("Tie-break needs a nonzero reference word")
    field = p.field
    return Fraction(field.div(y.coord(j), p.coord(j)), field.q)


def size_reduce_coefficient(e: Word, b: Word, b_plus: Word) -> int:
    """
    The a minimizing |pi_{b+}(e + a*b)| + TB_{b+}(e + a*b).

    On Supp(b+) the word b agrees with b+, so the weight for a is l minus the number of
    i in Supp(b+) with a = -e_i / b+_i, and the tie-break key is enc(e_j / b+_j + a).
    Distinct a give distinct keys, so the minimizer is unique.
    """
    mask = b_plus.support_mask
    if not mask:
        raise UsageError("Size reduction coefficient needs a nonzero b+")
    if b.project_onto_mask(mask) != b_plus:
        raise UsageError("b and b+ disagree on Supp(b+)")
    field = e.field
    length = b_plus.weight
    if field.is_binary:
        hits = (e.value & mask).bit_count()
        lead = e.coord((mask & -mask).bit_length() - 1)
        # a = 0 keeps the weight `hits`; a = 1 flips every coordinate of the support
        return 0 if (hits, lead) < (length - hits, 1 - lead) else 1

    gf = field.array_type
    support = np.array(b_plus.support())
    e_s = e.value[support]
    b_s = b_plus.value[support]
    zeroing = (-(e_s / b_s)).view(np.ndarray).astype(np.int64)
    weights = length - np.bincount(zeroing, minlength=field.q)
    elements = gf(np.arange(field.q))
    keys = ((e_s[0] / b_s[0]) + elements).view(np.ndarray).astype(np.int64)
    return int(np.lexsort((keys, weights))[0])


def size_reduce(basis: CodeBasis, y: Word) -> Word:
    """
    The representative of y + C(B) inside F(B+), reducing against b_k, ..., b_1.
    """
    if not basis.is_proper():
        raise UsageError(f"Size reduction needs a proper basis, got profile {basis.profile()}")
    e = y
    for i in range(basis.k - 1, -1, -1):
        row = basis.row(i)
        a = size_reduce_coefficient(e, row, basis.epipodal(i))
        e = e.add_scaled(row, a)
    return e


def in_fundamental_domain(basis: CodeBasis, y: Word) -> bool:
    if not basis.is_proper():
        raise UsageError(f"Fundamental domain needs a proper basis, got profile {basis.profile()}")
    return all(
        size_reduce_coefficient(y, basis.row(i), basis.epipodal(i)) == 0 for i in range(basis.k)
    )


def count_bounded_occupancy(n: int, q: int, m: int) -> int:
    """
    A(n, q, m): strings of length n over q symbols where no symbol occurs more than m
    times. Each symbol contributes sum_{t<=m} x^t / t!, tracked here as binomial
    convolutions to stay in the integers.
    """
    if n < 0 or q < 0:
        raise UsageError(f"Unsupported arguments: n={n}, q={q}")
    if n == 0:
        return 1 if m >= 0 or q == 0 else 0
    if m < 0 or q == 0:
        return 0
    counts = [1] + [0] * n
    for _ in range(q):
        counts = [
            sum(comb(r, t) * counts[r - t] for t in range(min(m, r) + 1)) for r in range(n + 1)
        ]
    return counts[n]


@functools.lru_cache(maxsize=1024)
def block_weight_distribution(length: int, q: int) -> tuple[int, ...]:
    """
    W(Y) for one block of epipodal length `length`, indexed by weight. Y keeps, per
    translation class of F_q^length by the all-ones direction, the word whose most
    frequent symbol is 0 and that wins the tie-break among the most frequent symbols.
    """
    if length < 1:
        raise UsageError(f"Unsupported epipodal length {length}")
    counts = [0] * (length + 1)
    for zeros in range(1, length + 1):
        total = 0
        for frequent in range(1, min(q, length // zeros) + 1):
            placements = 1
            for t in range(frequent):
                placements *= comb(length - zeros * t, zeros)
            term = (
                comb(q - 1, frequent - 1)
                * placements
                * count_bounded_occupancy(length - frequent * zeros, q - frequent, zeros - 1)
            )
            assert term % frequent == 0, (length, q, zeros, frequent)
            total += term // frequent
        counts[length - zeros] = total
    return tuple(counts)


def _convolve(left: Sequence[int], right: Sequence[int]) -> list[int]:
    result = [0] * (len(left) + len(right) - 1)
    for i, a in enumerate(left):
        if a:
            for j, b in enumerate(right):
                result[i + j] += a * b
    return result


@dataclass(frozen=True)
class WeightDistribution:
    q: int
    counts: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.counts) - 1

    @property
    def total(self) -> int:
        return sum(self.counts)

    def to_json(self) -> dict[str, Any]:
        # big integers go out as decimal strings
        return {"q": self.q, "n": self.n, "weights": [str(c) for c in self.counts]}


def fundamental_weight_distribution(
    profile: Sequence[int], q: int, n: int | None = None
) -> WeightDistribution:
    """
    W(F(B+)) from the epipodal profile alone, as the convolution of the per-block
    distributions. Coordinates outside the support (n > sum of the profile) are free
    and contribute a factor (1 + (q - 1) x) each.
    """
    if any(length < 1 for length in profile):
        raise UsageError(f"Weight distribution needs a proper profile, got {list(profile)}")
    support = sum(profile)
    n = support if n is None else n
    if n < support:
        raise UsageError(f"Length n={n} is below the profile sum {support}")
    counts = [1]
    for length in profile:
        counts = _convolve(counts, block_weight_distribution(length, q))
    free = [comb(n - support, w) * (q - 1) ** w for w in range(n - support + 1)]
    counts = _convolve(counts, free)
    logger.debug("weight distribution for q=%d, n=%d, k=%d", q, n, len(profile))
    return WeightDistribution(q=q, counts=tuple(counts))


def basis_weight_distribution(basis: CodeBasis) -> WeightDistribution:
    if not basis.is_proper():
        raise UsageError(f"Weight distribution needs a proper basis, got profile {basis.profile()}")
    return fundamental_weight_distribution(basis.profile(), basis.field.q, basis.n)


def coset_leader_probability(distribution: WeightDistribution, weight: int) -> Fraction:
    """
    probability that size reduction of a uniform target returns a word of this weight
    """
    if not 0 <= weight <= distribution.n:
        return Fraction(0)
    return Fraction(distribution.counts[weight], distribution.total)
