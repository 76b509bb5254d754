"""
Words and generator matrices over F_q.

Rows are 0-based and coordinates are 0-based. A block is addressed by a half-open
row range [start, stop) whose stop is clamped to k, so the block written B_[i,j]
with 1-based inclusive indices is `basis.block(i - 1, j)`.

Supports are Python ints used as bitsets for every q (bit i set iff coordinate i is
nonzero). For q = 2 the coordinates themselves are stored the same way, so vector
addition is XOR and Hamming weight is a popcount. Other fields store a 1-d
galois.FieldArray.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Iterable, Iterator, Sequence, Union

import galois
import numpy as np
import numpy.typing as npt

from code_basis_reduction.exceptions import DomainError, UsageError
from code_basis_reduction.gf import FieldSpec

logger = logging.getLogger(__name__)

WordValue = Union[int, galois.FieldArray]


def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_of(coords: Iterable[int]) -> int:
    mask = 0
    for i in coords:
        mask |= 1 << i
    return mask


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@functools.lru_cache(maxsize=256)
def mask_to_flags(mask: int, n: int) -> npt.NDArray[np.bool_]:
    raw = np.frombuffer((mask & full_mask(n)).to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    flags = np.unpackbits(raw, count=n, bitorder="little").astype(bool)
    flags.flags.writeable = False
    return flags


def flags_to_mask(flags: npt.ArrayLike) -> int:
    packed = np.packbits(np.asarray(flags, dtype=bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


class Word:
    """
    A length-n vector over F_q. Words are never mutated in place; every operation
    returns a new word.
    """

    __slots__ = ("field", "n", "value")

    def __init__(self, field: FieldSpec, n: int, value: WordValue) -> None:
        self.field = field
        self.n = n
        self.value = value

    @classmethod
    def from_coords(cls, field: FieldSpec, coords: Iterable[int] | npt.ArrayLike) -> Word:
        array = np.asarray(list(coords) if not isinstance(coords, np.ndarray) else coords)
        array = array.astype(np.int64).reshape(-1)
        if array.size and (array.min() < 0 or array.max() >= field.q):
            raise UsageError(f"Unsupported coordinates for {field}: {array.tolist()}")
        if field.is_binary:
            return cls(field, array.size, flags_to_mask(array != 0))
        return cls(field, array.size, field.array_type(array))

    @classmethod
    def zero(cls, field: FieldSpec, n: int) -> Word:
        if field.is_binary:
            return cls(field, n, 0)
        return cls(field, n, field.array_type.Zeros(n))

    @classmethod
    def unit(cls, field: FieldSpec, n: int, i: int, c: int = 1) -> Word:
        if not 0 <= i < n:
            raise UsageError(f"Unsupported unit index {i} for length {n}")
        if field.is_binary:
            return cls(field, n, field.check(c) << i)
        value = field.array_type.Zeros(n)
        value[i] = field.check(c)
        return cls(field, n, value)

    def coords(self) -> list[int]:
        return self.array().tolist()

    def array(self) -> npt.NDArray[np.int64]:
        if self.field.is_binary:
            return mask_to_flags(self.value, self.n).astype(np.int64)
        return self.value.view(np.ndarray).astype(np.int64)

    def coord(self, i: int) -> int:
        if self.field.is_binary:
            return (self.value >> i) & 1
        return int(self.value[i])

    @property
    def weight(self) -> int:
        if self.field.is_binary:
            return self.value.bit_count()
        return int(np.count_nonzero(self.value))

    @property
    def support_mask(self) -> int:
        if self.field.is_binary:
            return self.value
        return flags_to_mask(self.value.view(np.ndarray) != 0)

    def support(self) -> list[int]:
        return list(iter_bits(self.support_mask))

    def is_zero(self) -> bool:
        if self.field.is_binary:
            return self.value == 0
        return not np.any(self.value)

    def first_support_index(self) -> int | None:
        return self.first_index_within(full_mask(self.n))

    def first_index_within(self, mask: int) -> int | None:
        """
        smallest nonzero coordinate among those selected by `mask`, None if there is none
        """
        if self.field.is_binary:
            hits = self.value & mask
            return (hits & -hits).bit_length() - 1 if hits else None
        hits = np.flatnonzero((self.value.view(np.ndarray) != 0) & mask_to_flags(mask, self.n))
        return int(hits[0]) if hits.size else None

    def _check_compatible(self, other: Word) -> None:
        self.field.check_same(other.field)
        if self.n != other.n:
            raise UsageError(f"Mismatched word lengths: {self.n} and {other.n}")

    def __add__(self, other: Word) -> Word:
        self._check_compatible(other)
        if self.field.is_binary:
            return Word(self.field, self.n, self.value ^ other.value)
        return Word(self.field, self.n, self.value + other.value)

    def __neg__(self) -> Word:
        if self.field.is_binary or self.field.p == 2:
            return self
        return Word(self.field, self.n, -self.value)

    def __sub__(self, other: Word) -> Word:
        return self + (-other)

    def scale(self, c: int) -> Word:
        self.field.check(c)
        if self.field.is_binary:
            return self if c else Word(self.field, self.n, 0)
        return Word(self.field, self.n, self.value * self.field.array_type(c))

    def add_scaled(self, other: Word, c: int) -> Word:
        """
        self + c * other
        """
        if self.field.is_binary:
            self._check_compatible(other)
            return Word(self.field, self.n, self.value ^ other.value) if c else self
        if c == 0:
            return self
        return self + other.scale(c)

    def project_onto_mask(self, mask: int) -> Word:
        if self.field.is_binary:
            return Word(self.field, self.n, self.value & mask)
        value = self.value.copy()
        value[~mask_to_flags(mask, self.n)] = 0
        return Word(self.field, self.n, value)

    def project_orthogonal_mask(self, mask: int) -> Word:
        if self.field.is_binary:
            return Word(self.field, self.n, self.value & ~mask)
        value = self.value.copy()
        value[mask_to_flags(mask, self.n)] = 0
        return Word(self.field, self.n, value)

    def concat(self, other: Word) -> Word:
        self.field.check_same(other.field)
        if self.field.is_binary:
            return Word(self.field, self.n + other.n, self.value | (other.value << self.n))
        joined = np.concatenate((self.value.view(np.ndarray), other.value.view(np.ndarray)))
        return Word(self.field, self.n + other.n, joined.view(self.field.array_type))

    def truncate(self, length: int) -> Word:
        if not 0 <= length <= self.n:
            raise UsageError(f"Unsupported truncation length {length} for length {self.n}")
        if self.field.is_binary:
            return Word(self.field, length, self.value & full_mask(length))
        return Word(self.field, length, self.value[:length].copy())

    def split(self, length: int) -> tuple[Word, Word]:
        head = self.truncate(length)
        if self.field.is_binary:
            return head, Word(self.field, self.n - length, self.value >> length)
        return head, Word(self.field, self.n - length, self.value[length:].copy())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        if self.field != other.field or self.n != other.n:
            return False
        if self.field.is_binary:
            return self.value == other.value
        return bool(np.array_equal(self.value, other.value))

    def __hash__(self) -> int:
        if self.field.is_binary:
            return hash((2, self.n, self.value))
        return hash((self.field.q, self.n, self.value.view(np.ndarray).tobytes()))

    def __repr__(self) -> str:
        return f"Word({self.field}, {self.coords()})"


def project_onto(targets: Iterable[Word], y: Word) -> Word:
    """
    keep the coordinates of y lying in the union of the target supports
    """
    mask = 0
    for target in targets:
        y._check_compatible(target)
        mask |= target.support_mask
    return y.project_onto_mask(mask)


def project_orthogonal(targets: Iterable[Word], y: Word) -> Word:
    """
    zero the coordinates of y lying in the union of the target supports
    """
    mask = 0
    for target in targets:
        y._check_compatible(target)
        mask |= target.support_mask
    return y.project_orthogonal_mask(mask)


def combine(coefficients: Word, words: Sequence[Word]) -> Word:
    """
    sum of coefficients[u] * words[u]
    """
    if coefficients.n != len(words):
        raise UsageError(f"Expected {coefficients.n} words, got {len(words)}")
    if not words:
        raise UsageError("Cannot combine an empty list of words")
    result = Word.zero(words[0].field, words[0].n)
    for u in coefficients.support():
        result = result.add_scaled(words[u], coefficients.coord(u))
    return result


@dataclass
class Elimination:
    """
    Echelon state: every pivot row is 1 at its pivot column and zero on the allowed
    columns before it. `leftover` rows vanish on all allowed columns.
    """

    pivots: dict[int, Word] = dataclass_field(default_factory=dict)
    pivot_tracks: dict[int, Word] = dataclass_field(default_factory=dict)
    leftover: list[Word] = dataclass_field(default_factory=list)
    leftover_tracks: list[Word] = dataclass_field(default_factory=list)

    def columns(self) -> list[int]:
        return sorted(self.pivots)

    def back_substitute(self, field: FieldSpec) -> None:
        columns = self.columns()
        tracked = bool(self.pivot_tracks)
        for idx in range(len(columns) - 1, -1, -1):
            column = columns[idx]
            pivot = self.pivots[column]
            for other in columns[:idx]:
                c = self.pivots[other].coord(column)
                if c:
                    c = field.neg(c)
                    self.pivots[other] = self.pivots[other].add_scaled(pivot, c)
                    if tracked:
                        self.pivot_tracks[other] = self.pivot_tracks[other].add_scaled(
                            self.pivot_tracks[column], c
                        )


def eliminate(
    field: FieldSpec,
    rows: Sequence[Word],
    allowed: int,
    tracks: Sequence[Word] | None = None,
) -> Elimination:
    """
    Incremental Gaussian elimination choosing pivots only among the `allowed` columns,
    scanning them left to right, so the pivot columns form the lexicographically first
    independent set. `tracks` follow every row operation.
    """
    state = Elimination()
    for idx, row in enumerate(rows):
        track = tracks[idx] if tracks is not None else None
        while True:
            column = row.first_index_within(allowed)
            if column is None:
                state.leftover.append(row)
                if track is not None:
                    state.leftover_tracks.append(track)
                break
            pivot = state.pivots.get(column)
            if pivot is None:
                factor = field.inv(row.coord(column))
                state.pivots[column] = row.scale(factor)
                if track is not None:
                    state.pivot_tracks[column] = track.scale(factor)
                break
            c = field.neg(row.coord(column))
            row = row.add_scaled(pivot, c)
            if track is not None:
                track = track.add_scaled(state.pivot_tracks[column], c)
    return state


def identity_tracks(field: FieldSpec, size: int) -> list[Word]:
    return [Word.unit(field, size, t) for t in range(size)]


def rank(words: Sequence[Word]) -> int:
    if not words:
        return 0
    return len(eliminate(words[0].field, words, full_mask(words[0].n)).pivots)


def systematic_form(
    field: FieldSpec, rows: Sequence[Word], allowed: int, tracks: Sequence[Word] | None = None
) -> tuple[list[int], list[Word], list[Word]]:
    """
    Reduced echelon form over the allowed columns. Returns the pivot columns, the
    reduced rows (ordered by pivot column) and their tracks; raises DomainError when
    the rows are dependent on the allowed columns.
    """
    state = eliminate(field, rows, allowed, tracks)
    if state.leftover:
        raise DomainError(
            f"Rank {len(state.pivots)} on the chosen columns, expected {len(rows)}"
        )
    state.back_substitute(field)
    columns = state.columns()
    reduced = [state.pivots[c] for c in columns]
    reduced_tracks = [state.pivot_tracks[c] for c in columns] if tracks is not None else []
    return columns, reduced, reduced_tracks


class Transform:
    """
    A square matrix over F_q acting on basis rows from the left; row t holds the
    coefficients of new row t in terms of the old rows.
    """

    def __init__(self, field: FieldSpec, rows: Sequence[Word]) -> None:
        self.field = field
        self.rows = list(rows)
        for row in self.rows:
            if row.n != len(self.rows):
                raise UsageError(f"Transform rows must have length {len(self.rows)}")

    @classmethod
    def identity(cls, field: FieldSpec, size: int) -> Transform:
        return cls(field, identity_tracks(field, size))

    @classmethod
    def from_lists(cls, field: FieldSpec, entries: Sequence[Sequence[int]]) -> Transform:
        return cls(field, [Word.from_coords(field, row) for row in entries])

    @property
    def size(self) -> int:
        return len(self.rows)

    def as_lists(self) -> list[list[int]]:
        return [row.coords() for row in self.rows]

    def rank(self) -> int:
        return rank(self.rows)

    def is_invertible(self) -> bool:
        return self.rank() == self.size

    def compose(self, other: Transform) -> Transform:
        """
        self @ other, i.e. apply `other` first
        """
        if other.size != self.size:
            raise UsageError(f"Mismatched transform sizes {self.size} and {other.size}")
        return Transform(self.field, [combine(row, other.rows) for row in self.rows])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Transform):
            return NotImplemented
        return self.field == other.field and self.rows == other.rows

    def __repr__(self) -> str:
        return f"Transform({self.field}, {self.as_lists()})"


class CodeBasis:
    """
    A k x n generator matrix with the support prefix s_0..s_k kept up to date:
    s_0 = 0 and s_{i+1} = s_i | Supp(b_i) (0-based rows). The epipodal vector of row i
    is b_i with the coordinates of s_i zeroed, so every profile query is a mask
    operation.

    A basis has a single writer. Mutators recompute only the prefix entries the
    change can touch.
    """

    def __init__(self, field: FieldSpec, n: int, rows: Iterable[Word]) -> None:
        self.field = field
        self.n = n
        self._rows = list(rows)
        for row in self._rows:
            row.field.check_same(field)
            if row.n != n:
                raise UsageError(f"Row of length {row.n} in a basis of length {n}")
        self._supports = [row.support_mask for row in self._rows]
        self._prefix = [0] * (len(self._rows) + 1)
        self._recompute_prefix(0, len(self._rows))

    @classmethod
    def from_matrix(
        cls, field: FieldSpec, matrix: Sequence[Sequence[int]] | npt.ArrayLike, n: int | None = None
    ) -> CodeBasis:
        array = np.asarray(matrix, dtype=np.int64)
        if array.size == 0:
            return cls(field, array.shape[1] if array.ndim == 2 else (n or 0), [])
        if array.ndim != 2:
            raise UsageError(f"Expected a 2-d matrix, got shape {array.shape}")
        if array.min() < 0 or array.max() >= field.q:
            raise UsageError(f"Unsupported matrix entries for {field}")
        if field.is_binary:
            packed = np.packbits(array != 0, axis=1, bitorder="little")
            rows = [
                Word(field, array.shape[1], int.from_bytes(r.tobytes(), "little")) for r in packed
            ]
        else:
            values = field.array_type(array)
            rows = [Word(field, array.shape[1], values[t].copy()) for t in range(array.shape[0])]
        return cls(field, array.shape[1], rows)

    def _recompute_prefix(self, start: int, stop: int) -> None:
        for t in range(start, stop):
            self._prefix[t + 1] = self._prefix[t] | self._supports[t]

    @property
    def k(self) -> int:
        return len(self._rows)

    @property
    def rows(self) -> tuple[Word, ...]:
        return tuple(self._rows)

    def row(self, i: int) -> Word:
        return self._rows[i]

    def row_support(self, i: int) -> int:
        return self._supports[i]

    def prefix(self, i: int) -> int:
        """
        support mask s_i of the span of the first i rows
        """
        return self._prefix[i]

    def length(self, i: int) -> int:
        return (self._supports[i] & ~self._prefix[i]).bit_count()

    def profile(self) -> list[int]:
        return [self.length(i) for i in range(self.k)]

    def epipodal(self, i: int) -> Word:
        return self._rows[i].project_orthogonal_mask(self._prefix[i])

    def epipodal_matrix(self) -> tuple[list[Word], list[int]]:
        return [self.epipodal(i) for i in range(self.k)], self.profile()

    def is_proper(self) -> bool:
        return all(self.length(i) > 0 for i in range(self.k))

    def support_size(self) -> int:
        return self._prefix[self.k].bit_count()

    def block(self, start: int, stop: int) -> Block:
        stop = min(stop, self.k)
        if not 0 <= start < stop:
            raise UsageError(f"Unsupported block range [{start}, {stop}) for k={self.k}")
        return Block(self, start, stop)

    def copy(self) -> CodeBasis:
        duplicate = CodeBasis.__new__(CodeBasis)
        duplicate.field = self.field
        duplicate.n = self.n
        duplicate._rows = list(self._rows)
        duplicate._supports = list(self._supports)
        duplicate._prefix = list(self._prefix)
        return duplicate

    def replace_rows(self, start: int, rows: Sequence[Word]) -> None:
        stop = start + len(rows)
        if not 0 <= start <= stop <= self.k:
            raise UsageError(f"Unsupported row range [{start}, {stop}) for k={self.k}")
        old_prefix = self._prefix[stop]
        for offset, row in enumerate(rows):
            row.field.check_same(self.field)
            self._rows[start + offset] = row
            self._supports[start + offset] = row.support_mask
        self._recompute_prefix(start, stop)
        if self._prefix[stop] != old_prefix:
            # the span of the first `stop` rows changed, later prefixes follow
            self._recompute_prefix(stop, self.k)

    def apply_block_transform(self, start: int, stop: int, transform: Transform) -> None:
        """
        Replace rows start..stop-1 by transform @ rows. Epipodal vectors outside the
        range are unchanged and the profile sum over the range is preserved.
        """
        if not 0 <= start < stop <= self.k:
            raise UsageError(f"Unsupported block range [{start}, {stop}) for k={self.k}")
        if transform.size != stop - start:
            raise UsageError(
                f"Transform of size {transform.size} for a block of {stop - start} rows"
            )
        transform.field.check_same(self.field)
        if not transform.is_invertible():
            raise UsageError("Singular block transform")
        current = self._rows[start:stop]
        if self.field.is_binary:
            updated = [combine(coefficients, current) for coefficients in transform.rows]
        else:
            matrix = np.stack([t.value for t in transform.rows]).view(self.field.array_type)
            rows = np.stack([r.value for r in current]).view(self.field.array_type)
            product = matrix @ rows
            updated = [Word(self.field, self.n, product[t].copy()) for t in range(transform.size)]
        self.replace_rows(start, updated)

    def add_row_multiple(self, i: int, j: int, c: int) -> None:
        """
        b_j <- b_j + c * b_i for i < j; leaves every epipodal vector unchanged
        """
        if not 0 <= i < j < self.k:
            raise UsageError(f"add_row_multiple needs 0 <= i < j < k, got i={i}, j={j}")
        self.replace_rows(j, [self._rows[j].add_scaled(self._rows[i], c)])

    def matrix(self) -> list[list[int]]:
        return [row.coords() for row in self._rows]

    def rank(self) -> int:
        return rank(self._rows)

    def same_code(self, other: CodeBasis) -> bool:
        if self.field != other.field or self.n != other.n:
            return False
        return row_reduce(self).rows == row_reduce(other).rows

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CodeBasis):
            return NotImplemented
        return self.field == other.field and self.n == other.n and self._rows == other._rows

    def __repr__(self) -> str:
        return f"CodeBasis({self.field}, k={self.k}, n={self.n}, profile={self.profile()})"


@dataclass(frozen=True)
class Block:
    """
    Rows start..stop-1 of `origin` projected orthogonally to s_start.
    """

    origin: CodeBasis
    start: int
    stop: int

    @property
    def dimension(self) -> int:
        return self.stop - self.start

    def rows(self) -> list[Word]:
        mask = self.origin.prefix(self.start)
        return [
            self.origin.row(t).project_orthogonal_mask(mask) for t in range(self.start, self.stop)
        ]

    def as_basis(self) -> CodeBasis:
        return CodeBasis(self.origin.field, self.origin.n, self.rows())


def row_reduce(basis: CodeBasis) -> CodeBasis:
    """
    canonical reduced row echelon form of the row space (zero rows dropped)
    """
    state = eliminate(basis.field, basis.rows, full_mask(basis.n))
    state.back_substitute(basis.field)
    return CodeBasis(basis.field, basis.n, [state.pivots[c] for c in state.columns()])


def information_set(basis: CodeBasis) -> list[int]:
    """
    lexicographically first set of k independent columns
    """
    state = eliminate(basis.field, basis.rows, full_mask(basis.n))
    if state.leftover:
        raise DomainError(f"Rank-deficient basis: rank {len(state.pivots)} < k={basis.k}")
    return state.columns()


def systematize(basis: CodeBasis, coords: Iterable[int] | None = None) -> CodeBasis:
    """
    (B|_S)^-1 B for the given coordinate set S, or for the lexicographically first
    information set when S is omitted. The result is proper.
    """
    if coords is None:
        allowed = full_mask(basis.n)
    else:
        chosen = sorted(set(coords))
        if len(chosen) != basis.k or any(not 0 <= c < basis.n for c in chosen):
            raise UsageError(
                f"Expected {basis.k} distinct coordinates in [0, {basis.n}), got {chosen}"
            )
        allowed = mask_of(chosen)
    _, rows, _ = systematic_form(basis.field, basis.rows, allowed)
    return CodeBasis(basis.field, basis.n, rows)


def solve(basis: CodeBasis, target: Word) -> list[int]:
    """
    coefficients a with sum(a[t] * b_t) == target
    """
    field = basis.field
    target.field.check_same(field)
    if target.n != basis.n:
        raise UsageError(f"Mismatched word lengths: {target.n} and {basis.n}")
    state = eliminate(field, basis.rows, full_mask(basis.n), identity_tracks(field, basis.k))
    if state.leftover:
        raise DomainError(f"Rank-deficient basis: rank {len(state.pivots)} < k={basis.k}")
    residual, track = target, Word.zero(field, basis.k)
    while True:
        column = residual.first_support_index()
        if column is None:
            break
        pivot = state.pivots.get(column)
        if pivot is None:
            raise DomainError("Target is not in the row space")
        c = field.neg(residual.coord(column))
        residual = residual.add_scaled(pivot, c)
        track = track.add_scaled(state.pivot_tracks[column], c)
    return (-track).coords()


def k1(profile: Sequence[int]) -> int:
    """
    number of epipodal lengths above one
    """
    return sum(1 for length in profile if length > 1)


def k1_star(profile: Sequence[int]) -> int:
    """
    largest 1-based index whose epipodal length is above one, 0 if none
    """
    return max((i + 1 for i, length in enumerate(profile) if length > 1), default=0)


def read_matrix(path: str | Path) -> CodeBasis:
    """
    Read a generator matrix: a "q k n" header line, then k lines of n encodings.
    """
    tokens = Path(path).read_text().split()
    if len(tokens) < 3:
        raise UsageError(f"{path}: missing 'q k n' header")
    q, k, n = (int(t) for t in tokens[:3])
    entries = [int(t) for t in tokens[3:]]
    if len(entries) != k * n:
        raise UsageError(f"{path}: expected {k * n} entries, found {len(entries)}")
    field = FieldSpec.from_order(q)
    return CodeBasis.from_matrix(field, np.array(entries, dtype=np.int64).reshape(k, n), n=n)


def write_matrix(path: str | Path, basis: CodeBasis) -> None:
    lines = [f"{basis.field.q} {basis.k} {basis.n}"]
    lines.extend(" ".join(str(c) for c in row) for row in basis.matrix())
    Path(path).write_text("\n".join(lines) + "\n")
    logger.info("wrote %dx%d matrix over %s to %s", basis.k, basis.n, basis.field, path)
