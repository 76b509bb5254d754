"""
Forward reduction and the block reduction algorithms built on it.

A block B[i:j] is forward reduced when its first epipodal vector is a shortest nonzero
codeword of the projected block code. BKZ keeps every width-beta window forward
reduced (LLL is beta = 2); slide reduction alternates disjoint forward-reduced blocks
with shifted backward-reduced ones; approximate Griesmer reduction makes a single
pass over the tails B[i:k].

Every algorithm works on a copy of its input and returns it together with the
IterationCounters of the run.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from typing import Any, Union

import numpy as np

from code_basis_reduction import settings
from code_basis_reduction.backward import backward_reduce, is_backward_reduced
from code_basis_reduction.bounds import bkz_iteration_bound
from code_basis_reduction.domain import size_reduce_coefficient
from code_basis_reduction.exceptions import IterationCapExceeded, UsageError
from code_basis_reduction.linalg import Block, CodeBasis, Word, mask_to_flags, systematize
from code_basis_reduction.proper import insert_primitive, make_primitive

logger = logging.getLogger(__name__)

BlockLike = Union[Block, CodeBasis]

EXHAUSTIVE = "exhaustive"
LEE_BRICKELL = "lee-brickell"

# rows of candidate codewords materialized at once by the exhaustive search over F_q
_CHUNK_ENTRIES = 2**20


def _as_basis(block: BlockLike) -> CodeBasis:
    return block.as_basis() if isinstance(block, Block) else block


def shortest_in_pair(x1: Word, x2: Word) -> Word:
    """
    Shortest nonzero word of span(x1, x2), in O(n) field operations: either a multiple
    of x2 or x1 + a*x2 for the size reduction coefficient a.
    """
    if x2.is_zero():
        return x1
    a = size_reduce_coefficient(x1, x2, x2)
    candidate = x1.add_scaled(x2, a)
    if candidate.is_zero() or candidate.weight >= x2.weight:
        return x2
    return candidate


@dataclass(frozen=True)
class ShortestOracle:
    """
    Finds a short nonzero codeword of a small code. Blocks of dimension one and two are
    always solved exactly; larger ones are enumerated (`exhaustive`, exact, limited to
    `cutoff` dimensions) or searched with Lee-Brickell information sets
    (`lee-brickell`, `weight` = 1 or 2, `budget` random information sets).
    """

    kind: str = EXHAUSTIVE
    cutoff: int | None = None
    weight: int = settings.LEE_BRICKELL_WEIGHT
    budget: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in (EXHAUSTIVE, LEE_BRICKELL):
            raise UsageError(f"Unsupported oracle kind: {self.kind}")
        if self.weight not in (1, 2):
            raise UsageError(f"Unsupported Lee-Brickell weight: {self.weight}")
        if self.budget is not None and self.budget < 1:
            raise UsageError(f"Unsupported Lee-Brickell budget: {self.budget}")

    @classmethod
    def exhaustive(cls, cutoff: int | None = None) -> ShortestOracle:
        return cls(kind=EXHAUSTIVE, cutoff=cutoff)

    @classmethod
    def lee_brickell(
        cls, weight: int | None = None, budget: int | None = None, seed: int = 0
    ) -> ShortestOracle:
        return cls(
            kind=LEE_BRICKELL,
            weight=settings.LEE_BRICKELL_WEIGHT if weight is None else weight,
            budget=budget,
            seed=seed,
        )

    @staticmethod
    def cutoff_for(q: int) -> int:
        """
        largest dimension d with q^d <= 2^EXHAUSTIVE_CUTOFF_BITS
        """
        limit = 2**settings.EXHAUSTIVE_CUTOFF_BITS
        d = 0
        while q ** (d + 1) <= limit:
            d += 1
        return d

    @property
    def is_exact(self) -> bool:
        return self.kind == EXHAUSTIVE

    def shortest(self, block: BlockLike) -> Word:
        basis = _as_basis(block)
        dimension = basis.k
        if dimension == 0:
            raise UsageError("Cannot search an empty block")
        if dimension == 1:
            return basis.row(0)
        if dimension == 2:
            return shortest_in_pair(basis.row(0), basis.row(1))
        if self.kind == EXHAUSTIVE:
            cutoff = self.cutoff if self.cutoff is not None else self.cutoff_for(basis.field.q)
            if dimension > cutoff:
                raise UsageError(
                    f"Exhaustive search over dimension {dimension} exceeds the cutoff {cutoff}"
                )
            if basis.field.is_binary:
                return self._enumerate_binary(basis)
            return self._enumerate(basis)
        return self._lee_brickell(basis)

    def _enumerate_binary(self, basis: CodeBasis) -> Word:
        """
        Gray-code walk over all nonzero combinations. Bit t of the Gray code selects row
        dimension - 1 - t, so the Gray value is the coefficient vector read as a number
        and the smallest one wins among words of equal weight.
        """
        dimension = basis.k
        rows = [row.value for row in basis.rows]
        current = 0
        best_weight, best_code, best_value = basis.n + 1, 0, 0
        for g in range(1, 1 << dimension):
            t = (g & -g).bit_length() - 1
            current ^= rows[dimension - 1 - t]
            weight = current.bit_count()
            if weight <= best_weight:
                code = g ^ (g >> 1)
                if weight < best_weight or code < best_code:
                    best_weight, best_code, best_value = weight, code, current
        return Word(basis.field, basis.n, best_value)

    def _enumerate(self, basis: CodeBasis) -> Word:
        """
        Projective representatives (first nonzero coefficient 1) in lexicographic order
        of their coefficient vectors; the first word of minimum weight wins.
        """
        field = basis.field
        q, dimension = field.q, basis.k
        gf = field.array_type
        rows = gf(np.stack([row.array() for row in basis.rows]))
        chunk = max(1, _CHUNK_ENTRIES // max(basis.n, 1))
        best_weight, best = basis.n + 1, None
        for lead in range(dimension - 1, -1, -1):
            tail = dimension - 1 - lead
            count = q**tail
            for start in range(0, count, chunk):
                if tail:
                    index = np.arange(start, min(count, start + chunk))
                    digits = np.stack(np.unravel_index(index, (q,) * tail), axis=1)
                    words = gf(digits) @ rows[lead + 1 :] + rows[lead]
                else:
                    words = rows[lead : lead + 1]
                weights = np.count_nonzero(words.view(np.ndarray), axis=1)
                t = int(np.argmin(weights))
                if weights[t] < best_weight:
                    best_weight, best = int(weights[t]), words[t].copy()
        assert best is not None
        return Word(field, basis.n, best)

    def _lee_brickell(self, basis: CodeBasis) -> Word:
        """
        Reduce the block on random column orders and keep the lightest combination of at
        most `weight` rows of each reduced echelon form.
        """
        field = basis.field
        gf = field.array_type
        columns = np.flatnonzero(mask_to_flags(basis.prefix(basis.k), basis.n))
        generator = gf(np.stack([row.array()[columns] for row in basis.rows]))
        best = min(basis.rows, key=lambda row: row.weight)
        rng = np.random.Generator(np.random.Philox(self.seed))
        budget = self.budget or settings.LEE_BRICKELL_BUDGET_FACTOR * basis.k
        for _ in range(budget):
            order = rng.permutation(columns.size)
            echelon = generator[:, order].row_reduce()
            weight, found = self._lightest_combination(echelon, field.q)
            if weight < best.weight:
                coords = np.zeros(basis.n, dtype=np.int64)
                coords[columns[order]] = found
                best = Word.from_coords(field, coords)
        logger.debug("lee-brickell spent %d information sets, best weight %d", budget, best.weight)
        return best

    def _lightest_combination(self, echelon: Any, q: int) -> tuple[int, np.ndarray]:
        raw = echelon.view(np.ndarray)
        weights = np.count_nonzero(raw, axis=1)
        t = int(np.argmin(weights))
        best_weight, best = int(weights[t]), raw[t]
        if self.weight < 2:
            return best_weight, best
        if q == 2:
            packed = np.packbits(raw.astype(bool), axis=1)
            for i in range(raw.shape[0] - 1):
                pair_weights = np.bitwise_count(packed[i] ^ packed[i + 1 :]).sum(axis=1)
                t = int(np.argmin(pair_weights))
                if pair_weights[t] < best_weight:
                    best_weight, best = int(pair_weights[t]), raw[i] ^ raw[i + 1 + t]
            return best_weight, best
        gf = type(echelon)
        for i in range(raw.shape[0] - 1):
            for a in range(1, q):
                words = echelon[i] + gf(a) * echelon[i + 1 :]
                pair_weights = np.count_nonzero(words.view(np.ndarray), axis=1)
                t = int(np.argmin(pair_weights))
                if pair_weights[t] < best_weight:
                    best_weight, best = int(pair_weights[t]), words[t].view(np.ndarray)
        return best_weight, best


def shortest_codeword(block: BlockLike, oracle: ShortestOracle | None = None) -> Word:
    return (oracle or ShortestOracle.exhaustive()).shortest(block)


@dataclass
class IterationCounters:
    cap: int | None = None
    loop_iterations: int = 0
    forward_updates: int = 0
    backward_updates: int = 0

    def tick(self, basis: CodeBasis) -> None:
        self.loop_iterations += 1
        if self.cap is not None and self.loop_iterations > self.cap:
            raise IterationCapExceeded(
                f"Iteration cap {self.cap} exceeded after {self.forward_updates} forward and "
                f"{self.backward_updates} backward updates",
                basis,
                self,
            )

    def as_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


def lll_cap(n: int, k: int) -> int:
    return 2 * n * k + k


def slide_cap(n: int, k: int, beta: int) -> int:
    return -(-4 * k * n // beta)


def bkz_cap(n: int, k: int, beta: int) -> int:
    if beta == 2:
        return lll_cap(n, k)
    return min(bkz_iteration_bound(n, k, beta), settings.BKZ_CAP_FACTOR * n * k)


def _check_proper(basis: CodeBasis, name: str) -> None:
    if not basis.is_proper():
        raise UsageError(f"{name} needs a proper basis, got profile {basis.profile()}")


def _forward_step(
    basis: CodeBasis, start: int, stop: int, oracle: ShortestOracle, counters: IterationCounters
) -> bool:
    """
    Insert the oracle's word at `start` if it is shorter than the current epipodal
    vector there. Returns whether the basis changed.
    """
    block = basis.block(start, stop)
    block_basis = block.as_basis()
    c = oracle.shortest(block_basis)
    if c.weight >= basis.length(start):
        return False
    if not oracle.is_exact:
        c = make_primitive(block_basis, c)
    basis.apply_block_transform(block.start, block.stop, insert_primitive(block_basis, c))
    counters.forward_updates += 1
    logger.debug("inserted a word of weight %d at row %d", c.weight, start)
    return True


def _backward_step(basis: CodeBasis, start: int, stop: int, counters: IterationCounters) -> bool:
    block = basis.block(start, stop)
    block_basis = block.as_basis()
    if is_backward_reduced(block_basis):
        return False
    basis.apply_block_transform(block.start, block.stop, backward_reduce(block_basis))
    counters.backward_updates += 1
    logger.debug("backward reduced rows [%d, %d)", block.start, block.stop)
    return True


def bkz_reduce(
    basis: CodeBasis,
    beta: int,
    oracle: ShortestOracle | None = None,
    cap: int | None = None,
) -> tuple[CodeBasis, IterationCounters]:
    """
    Slide a window of width beta over the basis; whenever the window at i is not
    forward reduced insert a shortest word there and step back to max(0, i - beta + 1).
    """
    if not 2 <= beta <= basis.k:
        raise UsageError(f"Unsupported block size beta={beta} for k={basis.k}")
    _check_proper(basis, "BKZ")
    oracle = oracle or ShortestOracle.exhaustive()
    result = basis.copy()
    k = result.k
    counters = IterationCounters(cap=cap if cap is not None else bkz_cap(result.n, k, beta))
    logger.info("BKZ start: beta=%d, k=%d, n=%d, oracle=%s", beta, k, result.n, oracle.kind)

    i = 0
    while i < k - 1:
        counters.tick(result)
        if _forward_step(result, i, i + beta, oracle, counters):
            i = max(0, i - beta + 1)
        else:
            i += 1
    logger.info("BKZ done: %s", counters.as_dict())
    return result, counters


def lll_reduce(
    basis: CodeBasis, oracle: ShortestOracle | None = None, cap: int | None = None
) -> tuple[CodeBasis, IterationCounters]:
    return bkz_reduce(basis, 2, oracle, cap)


def slide_reduce(
    basis: CodeBasis,
    beta: int,
    oracle: ShortestOracle | None = None,
    cap: int | None = None,
) -> tuple[CodeBasis, IterationCounters]:
    """
    Forward reduce the disjoint blocks [i*beta, (i+1)*beta) and backward reduce the
    shifted blocks [i*beta + 1, (i+1)*beta + 1), moving back one block after each change.
    """
    k = basis.k
    if beta < 2 or beta > k or k % beta:
        raise UsageError(f"Block size beta={beta} must be in [2, k] and divide k={k}")
    _check_proper(basis, "Slide reduction")
    oracle = oracle or ShortestOracle.exhaustive()
    result = basis.copy()
    blocks = k // beta
    counters = IterationCounters(cap=cap if cap is not None else slide_cap(result.n, k, beta))
    logger.info("slide start: beta=%d, k=%d, n=%d, oracle=%s", beta, k, result.n, oracle.kind)

    i = 0
    while i < blocks:
        counters.tick(result)
        start = i * beta
        if _forward_step(result, start, start + beta, oracle, counters):
            i = max(0, i - 1)
        elif i <= blocks - 2 and _backward_step(result, start + 1, start + beta + 1, counters):
            i = max(0, i - 1)
        else:
            i += 1
    logger.info("slide done: %s", counters.as_dict())
    return result, counters


def one_block_reduce(basis: CodeBasis, beta: int, oracle: ShortestOracle | None = None) -> Word:
    """
    Shortest word of the subcode spanned by the first beta rows of the systematic basis,
    i.e. of the codewords vanishing on the last k - beta information coordinates.
    """
    if not 2 <= beta <= basis.k:
        raise UsageError(f"Unsupported block size beta={beta} for k={basis.k}")
    systematic = systematize(basis)
    subcode = CodeBasis(basis.field, basis.n, systematic.rows[:beta])
    return (oracle or ShortestOracle.exhaustive()).shortest(subcode)


def approx_griesmer_reduce(
    basis: CodeBasis,
    oracle: ShortestOracle | None = None,
    skip_threshold: int = 0,
) -> tuple[CodeBasis, IterationCounters]:
    """
    For i = 0 .. k-2 insert the oracle's word for the tail B[i:k] when it is shorter than
    the current epipodal vector. Rows whose epipodal length is already below
    `skip_threshold` are left alone.
    """
    _check_proper(basis, "Approximate Griesmer reduction")
    oracle = oracle or ShortestOracle.exhaustive()
    result = basis.copy()
    k = result.k
    counters = IterationCounters(cap=max(k - 1, 0))
    logger.info(
        "approximate Griesmer start: k=%d, n=%d, oracle=%s, skip below %d",
        k,
        result.n,
        oracle.kind,
        skip_threshold,
    )
    for i in range(k - 1):
        counters.tick(result)
        if result.length(i) < skip_threshold:
            continue
        _forward_step(result, i, k, oracle, counters)
    logger.info("approximate Griesmer done: %s", counters.as_dict())
    return result, counters


def is_forward_reduced(block: BlockLike, oracle: ShortestOracle | None = None) -> bool:
    basis = _as_basis(block)
    return basis.length(0) <= shortest_codeword(basis, oracle).weight


def is_bkz_reduced(basis: CodeBasis, beta: int, oracle: ShortestOracle | None = None) -> bool:
    if not basis.is_proper():
        return False
    return all(is_forward_reduced(basis.block(i, i + beta), oracle) for i in range(basis.k - 1))


def is_slide_reduced(basis: CodeBasis, beta: int, oracle: ShortestOracle | None = None) -> bool:
    k = basis.k
    if beta < 2 or k % beta:
        raise UsageError(f"Block size beta={beta} must be >= 2 and divide k={k}")
    if not basis.is_proper():
        return False
    blocks = k // beta
    forward = all(
        is_forward_reduced(basis.block(i * beta, (i + 1) * beta), oracle) for i in range(blocks)
    )
    backward = all(
        is_backward_reduced(basis.block(i * beta + 1, (i + 1) * beta + 1).as_basis())
        for i in range(blocks - 1)
    )
    return forward and backward


def is_griesmer_reduced(basis: CodeBasis, oracle: ShortestOracle | None = None) -> bool:
    if not basis.is_proper():
        return False
    return all(is_forward_reduced(basis.block(i, basis.k), oracle) for i in range(basis.k))
