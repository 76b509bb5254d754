"""
Redundant coordinate sets and backward reduction.

A set S of coordinates is redundant for a code when, for any two i, j in S, every
codeword satisfies c_j = a * c_i for one fixed nonzero a. The size of the largest
such set, eta(C), is the largest possible last epipodal length of a basis of C.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from code_basis_reduction.exceptions import DomainError, SelectionFailure, UsageError
from code_basis_reduction.linalg import (
    CodeBasis,
    Transform,
    identity_tracks,
    information_set,
    systematize,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RedundantSet:
    """
    `coords` in increasing order; `scalars[t]` is the a with c_{coords[t]} = a * c_{coords[0]}
    for every codeword c (so scalars[0] == 1).
    """

    coords: tuple[int, ...]
    scalars: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.coords)


def _normalized_columns(basis: CodeBasis) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Columns of the support scaled so that their first nonzero entry is 1. Returns the
    support column indices, the normalized k x |support| matrix and the leading entries.
    """
    field = basis.field
    matrix = np.stack([row.array() for row in basis.rows])
    nonzero = np.flatnonzero(np.any(matrix != 0, axis=0))
    if nonzero.size == 0:
        raise DomainError("Code has empty support")
    columns = matrix[:, nonzero]
    leading = columns[np.argmax(columns != 0, axis=0), np.arange(nonzero.size)]
    if field.is_binary:
        return nonzero, columns, leading
    gf = field.array_type
    normalized = (gf(columns) / gf(leading)).view(np.ndarray).astype(np.int64)
    return nonzero, normalized, leading


def max_redundant_set(basis: CodeBasis) -> RedundantSet:
    """
    Largest redundant set: the largest class of support columns that agree after
    normalization. Ties go to the lexicographically smallest normalized column.
    """
    if basis.k == 0:
        raise UsageError("Expected a basis with at least one row")
    support, normalized, leading = _normalized_columns(basis)
    _, inverse, counts = np.unique(normalized, axis=1, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    best = int(np.argmax(counts))
    members = np.flatnonzero(inverse == best)
    coords = tuple(int(support[t]) for t in members)

    field = basis.field
    base = int(leading[members[0]])
    scalars = tuple(field.div(int(leading[t]), base) for t in members)
    return RedundantSet(coords=coords, scalars=scalars)


def eta(basis: CodeBasis) -> int:
    return max_redundant_set(basis).size


def eta_lower_bound(q: int, k: int, support_size: int) -> int:
    """
    ceil((q - 1) * |Supp(C)| / (q^k - 1)), a pigeonhole bound on eta
    """
    if k < 1 or support_size < 0:
        raise UsageError(f"Unsupported arguments: k={k}, support_size={support_size}")
    return -(-(q - 1) * support_size // (q**k - 1))


def backward_reduce(basis: CodeBasis) -> Transform:
    """
    Invertible A such that A @ B is proper with last epipodal length eta(C).

    The first row m touching the redundant set is cleared from every later row on
    that set and then rotated to the end.
    """
    if not basis.is_proper():
        raise UsageError(f"Backward reduction needs a proper basis, got profile {basis.profile()}")
    field = basis.field
    k = basis.k
    redundant = max_redundant_set(basis)
    j1 = redundant.coords[0]
    m = next(t for t in range(k) if basis.row(t).coord(j1))
    pivot_inverse = field.inv(basis.row(m).coord(j1))

    tracks = identity_tracks(field, k)
    for i in range(m + 1, k):
        c = basis.row(i).coord(j1)
        if c:
            tracks[i] = tracks[i].add_scaled(tracks[m], field.neg(field.mul(pivot_inverse, c)))
    tracks.append(tracks.pop(m))
    logger.debug("backward reduction moved row %d to the end, eta=%d", m, redundant.size)
    return Transform(field, tracks)


def is_backward_reduced(basis: CodeBasis) -> bool:
    return basis.k > 0 and basis.is_proper() and basis.length(basis.k - 1) == eta(basis)


def default_tau(q: int, n: int) -> int:
    """
    3 * ceil(log_q n), computed without floating point
    """
    exponent, power = 0, 1
    while power < n:
        exponent, power = exponent + 1, power * q
    return max(1, 3 * exponent)


def full_backward_reduce(basis: CodeBasis, tau: int) -> CodeBasis:
    """
    Backward reduce the prefixes B[0:tau], B[0:tau-1], ..., B[0:1] in that order.
    Each prefix is touched once; shorter prefixes are unaffected by longer ones later.
    """
    if not 1 <= tau <= basis.k:
        raise UsageError(f"Unsupported threshold tau={tau} for k={basis.k}")
    if not basis.is_proper():
        raise UsageError(f"Full backward reduction needs a proper basis: {basis.profile()}")
    result = basis.copy()
    updates = 0
    for i in range(tau, 0, -1):
        prefix = result.block(0, i).as_basis()
        if is_backward_reduced(prefix):
            continue
        result.apply_block_transform(0, i, backward_reduce(prefix))
        updates += 1
    logger.info("full backward reduction up to tau=%d applied %d updates", tau, updates)
    return result


def is_fully_backward_reduced(basis: CodeBasis, tau: int) -> bool:
    if not 1 <= tau <= basis.k:
        raise UsageError(f"Unsupported threshold tau={tau} for k={basis.k}")
    if not basis.is_proper():
        return False
    return all(is_backward_reduced(basis.block(0, i).as_basis()) for i in range(1, tau + 1))


def selective_backward_reduce(basis: CodeBasis, beta: int) -> CodeBasis:
    """
    Systematize on the first k independent columns, then backward reduce the first i
    rows restricted to the first j columns for i = (n - k)/beta - 1 down to 1, with j
    starting at k + 2*beta and growing by beta per step.

    Raises SelectionFailure when the independent columns do not all lie within the
    first k + beta columns; a fresh random code usually succeeds.
    """
    n, k = basis.n, basis.k
    if beta < 2 or (n - k) % beta:
        raise UsageError(f"Block width beta={beta} must be >= 2 and divide n - k = {n - k}")
    try:
        columns = information_set(basis)
    except DomainError as e:
        raise SelectionFailure(str(e)) from e
    if columns and columns[-1] >= k + beta:
        raise SelectionFailure(
            f"Information set reaches column {columns[-1]}, beyond the first k + beta = {k + beta}"
        )
    result = systematize(basis, columns)

    j = k + 2 * beta
    for i in range((n - k) // beta - 1, 0, -1):
        rows = min(i, k)
        truncated = CodeBasis(
            result.field, j, [result.row(t).truncate(j) for t in range(rows)]
        )
        result.apply_block_transform(0, rows, backward_reduce(truncated))
        j += beta
    logger.info(
        "selective backward reduction with beta=%d done, last width %d", beta, min(j - beta, n)
    )
    return result
