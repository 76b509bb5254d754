"""
Quality guarantees of reduced bases, expressed as integer arithmetic on profiles.

s_q(d, k), the shortest length of a k-dimensional code of minimum distance d, is not
known in general. Every bound here takes an SqProxy that must never exceed it; the
Griesmer sum is the one shipped.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

from code_basis_reduction.exceptions import UsageError
from code_basis_reduction.linalg import CodeBasis


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def griesmer_sum(q: int, d: int, k: int) -> int:
    """
    sum_{i<k} ceil(d / q^i)
    """
    if d < 0 or k < 0:
        raise UsageError(f"Unsupported arguments: d={d}, k={k}")
    return sum(_ceil_div(d, q**i) for i in range(k))


class SqProxy(Protocol):
    def evaluate(self, d: int, k: int) -> int: ...


@dataclass(frozen=True)
class GriesmerProxy:
    q: int

    def evaluate(self, d: int, k: int) -> int:
        return griesmer_sum(self.q, d, k)


def _largest_feasible(n: int, total: Callable[[int], int]) -> int:
    """
    largest d in [1, n] with total(d) <= n, for a non-decreasing total; 0 if none
    """
    return bisect.bisect_right(range(1, n + 1), n, key=total)


def griesmer_inverse(q: int, n: int, k: int) -> int:
    return _largest_feasible(n, lambda d: griesmer_sum(q, d, k))


def lll_griesmer_check(profile: Sequence[int], q: int, n: int) -> bool:
    if not profile:
        return True
    return n >= griesmer_sum(q, profile[0], len(profile))


def lll_decay_check(profile: Sequence[int], q: int) -> bool:
    """
    l_{i+1} >= ceil(l_i / q) for every consecutive pair
    """
    return all(b >= _ceil_div(a, q) for a, b in zip(profile, profile[1:]))


def full_backward_check(profile: Sequence[int], q: int, n: int, k: int, tau: int) -> bool:
    if not profile:
        return True
    return griesmer_sum(q, profile[0], tau) <= n - k + tau


def full_backward_output_bound(q: int, n: int, k: int, tau: int) -> int:
    return _largest_feasible(n, lambda d: griesmer_sum(q, d, tau) - tau + k)


def one_block_check(weight: int, q: int, n: int, k: int) -> bool:
    """
    n >= sum_{i=1..k} ceil(|c| / q^i)
    """
    return n >= sum(_ceil_div(weight, q**i) for i in range(1, k + 1))


def twin_reduction_check(
    profile: Sequence[int], q: int, beta: int, proxy: SqProxy | None = None
) -> bool:
    """
    For consecutive slide blocks, 0-based:
    l_{(i+1)beta} >= ceil((q-1)(s(l_{i beta}, beta) - l_{i beta}) / (q^beta - q))
    """
    proxy = proxy or GriesmerProxy(q)
    for start in range(0, len(profile) - beta, beta):
        head, next_head = profile[start], profile[start + beta]
        if next_head < _ceil_div((q - 1) * (proxy.evaluate(head, beta) - head), q**beta - q):
            return False
    return True


def bkz_profile_total(
    q: int, k: int, beta: int, proxy: SqProxy | None = None
) -> Callable[[int], int]:
    """
    Minimal length of a beta-BKZ reduced basis with first epipodal length l_1:
    w_1 = s(l_1, beta), c_i = ceil((q-1) w_i / (q^beta - 1)), w_{i+1} = s(c_i, beta), and
    w_1 - c_1 + ... + w_{m-1} - c_{m-1} + w_m with m = (k-1)/(beta-1).
    """
    if not 2 <= beta <= k or (k - 1) % (beta - 1):
        raise UsageError(f"Block size beta={beta} must satisfy (beta - 1) | (k - 1), k={k}")
    sq = proxy or GriesmerProxy(q)
    steps = (k - 1) // (beta - 1)

    def total(first: int) -> int:
        w = sq.evaluate(first, beta)
        result = 0
        for _ in range(steps - 1):
            c = _ceil_div((q - 1) * w, q**beta - 1)
            result += w - c
            w = sq.evaluate(c, beta)
        return result + w

    return total


def bkz_output_bound(q: int, n: int, k: int, beta: int, proxy: SqProxy | None = None) -> int:
    """
    Largest l_1 compatible with a beta-BKZ reduced basis of length n.
    """
    return _largest_feasible(n, bkz_profile_total(q, k, beta, proxy))


def slide_profile_total(
    q: int, k: int, beta: int, proxy: SqProxy | None = None
) -> Callable[[int], int]:
    """
    w_1 + ... + w_p as a function of c_1, where w_i = s(c_i, beta),
    c_{i+1} = ceil((q-1)(w_i - c_i) / (q^beta - q)) and p = k / beta.
    """
    if beta < 2 or k % beta:
        raise UsageError(f"Block size beta={beta} must be >= 2 and divide k={k}")
    sq = proxy or GriesmerProxy(q)
    blocks = k // beta

    def total(first: int) -> int:
        c, result = first, 0
        for _ in range(blocks):
            w = sq.evaluate(c, beta)
            result += w
            c = _ceil_div((q - 1) * (w - c), q**beta - q)
        return result

    return total


def slide_output_bound(q: int, n: int, k: int, beta: int, proxy: SqProxy | None = None) -> int:
    """
    Largest c_1 with slide_profile_total(c_1) <= n.
    """
    return _largest_feasible(n, slide_profile_total(q, k, beta, proxy))


def bkz_approx_factor_check(basis: CodeBasis, beta: int, dmin: int) -> bool:
    """
    l_1 <= q^(k - beta) * d_min
    """
    return basis.length(0) <= basis.field.q ** (basis.k - beta) * dmin


def bkz_iteration_bound(n: int, k: int, beta: int) -> int:
    """
    a very weak worst-case loop count for BKZ, only used to clamp caps
    """
    return beta * n ** (k - 1) * (n - k + 2) - 1 + k
