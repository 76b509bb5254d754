import itertools
from unittest import TestCase

import pytest
from hypothesis import given, settings

from code_basis_reduction.bounds import (
    bkz_approx_factor_check,
    lll_decay_check,
    lll_griesmer_check,
    slide_output_bound,
    twin_reduction_check,
)
from code_basis_reduction.exceptions import IterationCapExceeded, UsageError
from code_basis_reduction.gf import GF2
from code_basis_reduction.linalg import CodeBasis, Word, solve, systematize
from code_basis_reduction.reduce import (
    IterationCounters,
    ShortestOracle,
    approx_griesmer_reduce,
    bkz_cap,
    bkz_reduce,
    is_bkz_reduced,
    is_griesmer_reduced,
    is_slide_reduced,
    lll_cap,
    lll_reduce,
    one_block_reduce,
    shortest_codeword,
    slide_cap,
    slide_reduce,
)
from tests.fixtures import codewords, make_code, make_shuffled_code, minimum_distance, small_codes


def _first_projective_minimum(basis: CodeBasis) -> Word:
    """
    first word of minimum weight among coefficient vectors whose first nonzero entry is 1
    """
    best = None
    for coefficients in itertools.product(range(basis.field.q), repeat=basis.k):
        nonzero = [a for a in coefficients if a]
        if not nonzero or nonzero[0] != 1:
            continue
        word = Word.zero(basis.field, basis.n)
        for row, a in zip(basis.rows, coefficients):
            word = word.add_scaled(row, a)
        if best is None or word.weight < best.weight:
            best = word
    assert best is not None
    return best


class ShortestOracleTestCase(TestCase):
    def setUp(self) -> None:
        self.exact = ShortestOracle.exhaustive()

    def test_binary_ties_go_to_the_smallest_coefficient_vector(self):
        basis = CodeBasis.from_matrix(GF2, [[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0]])
        self.assertEqual(shortest_codeword(basis).coords(), [1, 0, 1, 0])

    @settings(max_examples=60, deadline=None)
    @given(small_codes(fields=(2, 3, 4, 5), max_n=10, max_k=4))
    def test_exhaustive_search_returns_the_first_shortest_projective_word(self, basis):
        found = self.exact.shortest(basis)
        self.assertEqual(found.weight, minimum_distance(basis))
        if basis.k >= 3:
            self.assertEqual(found, _first_projective_minimum(basis))

    def test_blocks_are_searched_in_their_projected_code(self):
        basis = make_shuffled_code(3, 5, 12, seed=8)
        block = basis.block(2, 5)
        found = shortest_codeword(block)
        self.assertEqual(found.weight, minimum_distance(block.as_basis()))
        self.assertEqual(found.support_mask & basis.prefix(2), 0)

    def test_cutoff_is_derived_from_the_field_size(self):
        self.assertEqual(ShortestOracle.cutoff_for(2), 20)
        self.assertEqual(ShortestOracle.cutoff_for(4), 10)
        self.assertEqual(ShortestOracle.cutoff_for(3), 12)
        with self.assertRaises(UsageError):
            ShortestOracle.exhaustive(cutoff=3).shortest(make_code(2, 4, 10))

    def test_lee_brickell_returns_a_codeword_no_shorter_than_the_minimum(self):
        for q, seed in itertools.product((2, 3, 4), range(4)):
            basis = make_code(q, 6, 14, seed)
            oracle = ShortestOracle.lee_brickell(budget=30, seed=seed)
            found = oracle.shortest(basis)
            self.assertFalse(found.is_zero())
            solve(basis, found)
            self.assertGreaterEqual(found.weight, minimum_distance(basis))
            self.assertEqual(oracle.shortest(basis), found)
            self.assertFalse(oracle.is_exact)

    def test_unsupported_oracle_parameters_are_rejected(self):
        with self.assertRaises(UsageError):
            ShortestOracle(kind="sieve")
        with self.assertRaises(UsageError):
            ShortestOracle.lee_brickell(weight=3)
        with self.assertRaises(UsageError):
            ShortestOracle.lee_brickell(budget=0)


class IterationCapTestCase(TestCase):
    def test_caps(self):
        self.assertEqual(lll_cap(10, 5), 105)
        self.assertEqual(slide_cap(10, 4, 3), 54)
        self.assertEqual(bkz_cap(10, 5, 2), lll_cap(10, 5))
        self.assertEqual(bkz_cap(40, 20, 4), 10_000 * 40 * 20)

    def test_exceeding_the_cap_reports_the_partial_state(self):
        basis = make_code(2, 20, 40, seed=1)
        with self.assertRaises(IterationCapExceeded) as context:
            lll_reduce(basis, cap=0)
        self.assertIsInstance(context.exception.counters, IterationCounters)
        self.assertEqual(context.exception.counters.loop_iterations, 1)
        self.assertTrue(context.exception.basis.same_code(basis))


class LLLReductionTestCase(TestCase):
    def _check_guarantees(self, q: int, n: int, seed: int) -> None:
        basis = make_code(q, n // 2, n, seed)
        reduced, counters = lll_reduce(basis)
        profile = reduced.profile()
        self.assertTrue(lll_decay_check(profile, q), (q, n, seed))
        self.assertTrue(lll_griesmer_check(profile, q, n), (q, n, seed))
        self.assertLessEqual(counters.loop_iterations, lll_cap(n, n // 2))
        self.assertTrue(reduced.is_proper())
        self.assertTrue(reduced.same_code(basis))
        self.assertTrue(is_bkz_reduced(reduced, 2))

    def test_output_meets_the_decay_and_griesmer_guarantees(self):
        for q, n in itertools.product((2, 3, 4), (16, 32, 64, 128)):
            for seed in range(3 if n < 128 else 1):
                self._check_guarantees(q, n, seed)

    @pytest.mark.slow
    def test_guarantees_on_two_hundred_codes_up_to_length_256(self):
        for instance in range(200):
            q = (2, 3, 4)[instance % 3]
            n = 8 * (1 + (7 * instance) % 32)
            self._check_guarantees(q, n, instance)

    def test_improper_input_is_rejected(self):
        basis = CodeBasis.from_matrix(GF2, [[1, 1, 0], [0, 1, 0]])
        with self.assertRaises(UsageError):
            lll_reduce(basis)

    def test_input_basis_is_left_untouched(self):
        basis = make_code(3, 8, 20, seed=2)
        before = basis.matrix()
        lll_reduce(basis)
        self.assertEqual(basis.matrix(), before)


class BKZReductionTestCase(TestCase):
    def test_first_length_is_within_the_approximation_factor(self):
        for seed in range(100):
            k = 4 + seed % 5
            n = 2 * k + seed % 9
            basis = make_shuffled_code(2, k, n, seed)
            dmin = minimum_distance(basis)
            for beta in (2, 4):
                reduced, _ = bkz_reduce(basis, beta)
                self.assertTrue(bkz_approx_factor_check(reduced, beta, dmin), (seed, beta))
                self.assertTrue(is_bkz_reduced(reduced, beta))
                self.assertTrue(reduced.same_code(basis))

    def test_full_width_bkz_puts_a_minimum_weight_word_first(self):
        basis = make_code(3, 5, 12, seed=6)
        reduced, _ = bkz_reduce(basis, 5)
        self.assertEqual(reduced.length(0), minimum_distance(basis))

    def test_block_size_out_of_range_is_rejected(self):
        basis = make_code(2, 4, 10)
        for beta in (1, 5):
            with self.assertRaises(UsageError):
                bkz_reduce(basis, beta)


class SlideReductionTestCase(TestCase):
    def test_designated_blocks_are_reduced_within_the_loop_cap(self):
        for q, beta, seed in itertools.product((2, 3), (2, 4), range(5)):
            k = 8
            n = 16 + 4 * seed
            basis = make_code(q, k, n, seed)
            reduced, counters = slide_reduce(basis, beta)
            profile = reduced.profile()
            self.assertLessEqual(counters.loop_iterations, slide_cap(n, k, beta))
            self.assertTrue(is_slide_reduced(reduced, beta), (q, beta, seed))
            self.assertTrue(twin_reduction_check(profile, q, beta), (q, beta, seed))
            self.assertLessEqual(profile[0], slide_output_bound(q, n, k, beta))
            self.assertTrue(reduced.same_code(basis))

    def test_block_size_must_divide_the_dimension(self):
        basis = make_code(2, 6, 14)
        with self.assertRaises(UsageError):
            slide_reduce(basis, 4)
        with self.assertRaises(UsageError):
            is_slide_reduced(basis, 4)


class ApproxGriesmerReductionTestCase(TestCase):
    def test_exact_oracle_output_is_griesmer_reduced(self):
        for q, seed in itertools.product((2, 3), range(5)):
            basis = make_code(q, 6, 14, seed)
            reduced, counters = approx_griesmer_reduce(basis)
            self.assertTrue(is_griesmer_reduced(reduced), (q, seed))
            self.assertEqual(reduced.length(0), minimum_distance(basis))
            self.assertEqual(counters.loop_iterations, 5)

    def test_lee_brickell_oracle_keeps_the_code_and_properness(self):
        basis = make_code(2, 24, 48, seed=3)
        oracle = ShortestOracle.lee_brickell(budget=5, seed=3)
        reduced, _ = approx_griesmer_reduce(basis, oracle, skip_threshold=3)
        self.assertTrue(reduced.is_proper())
        self.assertTrue(reduced.same_code(basis))
        self.assertLessEqual(reduced.length(0), basis.length(0))

    def test_rows_below_the_skip_threshold_are_left_alone(self):
        basis = make_code(2, 6, 14, seed=1)
        reduced, counters = approx_griesmer_reduce(basis, skip_threshold=15)
        self.assertEqual(reduced, basis)
        self.assertEqual(counters.forward_updates, 0)


class OneBlockReductionTestCase(TestCase):
    def test_word_is_a_shortest_word_of_the_shortened_subcode(self):
        for q, seed in itertools.product((2, 3), range(4)):
            basis = make_shuffled_code(q, 6, 14, seed)
            word = one_block_reduce(basis, 3)
            subcode = CodeBasis(basis.field, basis.n, systematize(basis).rows[:3])
            self.assertEqual(word.weight, minimum_distance(subcode))
            self.assertIn(word, list(codewords(subcode)))

    def test_block_size_out_of_range_is_rejected(self):
        with self.assertRaises(UsageError):
            one_block_reduce(make_code(2, 3, 8), 4)
