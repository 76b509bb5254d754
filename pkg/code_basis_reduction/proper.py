"""
Primitivity and the two pieces of basis surgery built on it.

A nonzero codeword c is primitive when no nonzero codeword has support strictly
inside Supp(c); equivalently the projection of the code orthogonal to Supp(c) has
dimension k - 1, which is the test used here.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

from code_basis_reduction.exceptions import DomainError, UsageError
from code_basis_reduction.linalg import (
    CodeBasis,
    Transform,
    Word,
    eliminate,
    full_mask,
    identity_tracks,
    mask_of,
    rank,
    solve,
    systematic_form,
    systematize,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PrimitivityWitness:
    primitive: bool
    witness: Word | None = None

    def verify(self, basis: CodeBasis, c: Word) -> bool:
        """
        re-check the verdict's evidence: a nonzero codeword supported strictly inside Supp(c)
        """
        if self.primitive:
            return self.witness is None
        if self.witness is None or self.witness.is_zero():
            return False
        inside = self.witness.support_mask & ~c.support_mask == 0
        strictly = self.witness.support_mask != c.support_mask
        try:
            solve(basis, self.witness)
        except DomainError:
            return False
        return inside and strictly


def _check_codeword(basis: CodeBasis, c: Word) -> None:
    if c.is_zero():
        raise UsageError("Expected a nonzero codeword")
    try:
        solve(basis, c)
    except DomainError as e:
        raise UsageError(f"Word is not in the code: {c}") from e


def special_subcode(basis: CodeBasis, coords: Iterable[int]) -> CodeBasis:
    """
    Basis of the subcode {c in C : c_i = 0 for all i in coords}.

    Pivots are picked greedily among `coords` (lowest index first); the rows left
    without a pivot vanish on all of `coords` and span the subcode. An empty subcode
    comes back as a basis with k = 0.
    """
    state = eliminate(basis.field, basis.rows, mask_of(coords) & full_mask(basis.n))
    return CodeBasis(basis.field, basis.n, state.leftover)


def _is_multiple(word: Word, c: Word) -> bool:
    i = c.first_support_index()
    assert i is not None
    factor = word.field.div(word.coord(i), c.coord(i))
    return word == c.scale(factor)


def is_primitive(basis: CodeBasis, c: Word) -> PrimitivityWitness:
    _check_codeword(basis, c)
    mask = c.support_mask
    projected = [row.project_orthogonal_mask(mask) for row in basis.rows]
    if rank(projected) == basis.k - 1:
        return PrimitivityWitness(primitive=True)

    inside = special_subcode(basis, (i for i in range(basis.n) if not mask >> i & 1))
    for candidate in inside.rows:
        if _is_multiple(candidate, c):
            continue
        i = candidate.first_support_index()
        assert i is not None
        # zero coordinate i while staying inside Supp(c)
        witness = c.scale(candidate.coord(i)) - candidate.scale(c.coord(i))
        return PrimitivityWitness(primitive=False, witness=witness)
    raise AssertionError("rank test and subcode disagree")  # pragma: no cover


def make_primitive(basis: CodeBasis, c: Word) -> Word:
    """
    A primitive codeword p with Supp(p) inside Supp(c): the first row of the
    systematized subcode of words supported inside Supp(c).
    """
    _check_codeword(basis, c)
    mask = c.support_mask
    inside = special_subcode(basis, (i for i in range(basis.n) if not mask >> i & 1))
    return systematize(inside).row(0)


def insert_primitive(basis: CodeBasis, p: Word) -> Transform:
    """
    Invertible A such that A @ B is a proper basis of the same code with first row p.
    """
    field = basis.field
    if p.is_zero():
        raise UsageError("Expected a nonzero codeword")
    try:
        coefficients = solve(basis, p)
    except DomainError as e:
        raise UsageError(f"Word is not in the code: {p}") from e

    k = basis.k
    m = next(t for t, a in enumerate(coefficients) if a)
    tracks = identity_tracks(field, k)
    tracks[m] = Word.from_coords(field, coefficients)
    tracks[0], tracks[m] = tracks[m], tracks[0]
    rows = list(basis.rows)
    rows[m] = p
    rows[0], rows[m] = rows[m], rows[0]
    if k == 1:
        return Transform(field, tracks)

    mask = p.support_mask
    rest = [row.project_orthogonal_mask(mask) for row in rows[1:]]
    try:
        _, _, rest_tracks = systematic_form(field, rest, full_mask(basis.n), tracks[1:])
    except DomainError as e:
        raise DomainError(f"Word is not primitive: {p}") from e
    logger.debug("inserted primitive word of weight %d at position %d", p.weight, m)
    return Transform(field, [tracks[0], *rest_tracks])
