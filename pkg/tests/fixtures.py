"""
Brute-force oracles and small random codes shared by the test modules.
"""

from __future__ import annotations

import itertools
from typing import Iterator

import galois
import numpy as np
from hypothesis import strategies as st

from code_basis_reduction.bench import sample_random_code
from code_basis_reduction.gf import FieldSpec
from code_basis_reduction.linalg import CodeBasis, Word

SMALL_FIELDS = (2, 3, 4, 5)

# mean sorted l1 and mean k1 of 10 trials on random binary [1280, 640] codes
REFERENCE_AVERAGES = {
    "lll": {"sorted_l1": 292.6, "k1": 12.7},
    "bkz8": {"sorted_l1": 274.8, "k1": 18.1},
    "slide8": {"sorted_l1": 281.0, "k1": 14.4},
    "fullbackward": {"sorted_l1": 284.9, "k1": 16.9},
}
SORTED_L1_TOLERANCE = 5.0
K1_TOLERANCE = 2.5
APPROX_GRIESMER_MIN_K1 = 18.1


def make_code(q: int, k: int, n: int, seed: int = 0, systematic: bool = True) -> CodeBasis:
    return sample_random_code(q, k, n, seed, systematic)


def make_shuffled_code(q: int, k: int, n: int, seed: int = 0) -> CodeBasis:
    """
    A proper basis that is not systematic: random multiples of earlier rows are added to
    later ones, which leaves every epipodal vector unchanged.
    """
    basis = make_code(q, k, n, seed)
    rng = np.random.Generator(np.random.Philox(seed + 7919))
    for j in range(1, k):
        for i in range(j):
            basis.add_row_multiple(i, j, int(rng.integers(q)))
    return basis


def matrix_of(basis: CodeBasis) -> galois.FieldArray:
    return basis.field.array_type(np.asarray(basis.matrix(), dtype=np.int64))


def codewords(basis: CodeBasis) -> Iterator[Word]:
    """
    every codeword, the zero word included, in lexicographic order of coefficients
    """
    field = basis.field
    matrix = matrix_of(basis)
    for coefficients in itertools.product(range(field.q), repeat=basis.k):
        word = field.array_type(list(coefficients)) @ matrix
        yield Word.from_coords(field, word.view(np.ndarray))


def minimum_distance(basis: CodeBasis) -> int:
    return min(word.weight for word in codewords(basis) if not word.is_zero())


def weight_histogram(words: Iterator[Word], n: int) -> list[int]:
    counts = [0] * (n + 1)
    for word in words:
        counts[word.weight] += 1
    return counts


def all_vectors(field: FieldSpec, n: int) -> Iterator[Word]:
    for coords in itertools.product(range(field.q), repeat=n):
        yield Word.from_coords(field, coords)


def naive_eta(basis: CodeBasis) -> int:
    """
    Largest set of support columns that are pairwise proportional, by comparing every
    pair of columns against every nonzero scalar.
    """
    field = basis.field
    columns = matrix_of(basis).T
    support = [c for c in range(basis.n) if np.any(columns[c] != 0)]
    best = 0
    for i in support:
        members = 0
        for j in support:
            if any(
                np.array_equal(columns[j], columns[i] * field.array_type(a))
                for a in range(1, field.q)
            ):
                members += 1
        best = max(best, members)
    return best


@st.composite
def small_codes(
    draw: st.DrawFn,
    fields: tuple[int, ...] = SMALL_FIELDS,
    max_n: int = 12,
    max_k: int = 4,
    systematic: bool = True,
) -> CodeBasis:
    q = draw(st.sampled_from(fields))
    n = draw(st.integers(min_value=2, max_value=max_n))
    k = draw(st.integers(min_value=1, max_value=min(max_k, n)))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return make_code(q, k, n, seed, systematic)
