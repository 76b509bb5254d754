from unittest import TestCase

import pytest
from hypothesis import given, settings

from code_basis_reduction.backward import (
    backward_reduce,
    default_tau,
    eta,
    eta_lower_bound,
    full_backward_reduce,
    is_backward_reduced,
    is_fully_backward_reduced,
    max_redundant_set,
    selective_backward_reduce,
)
from code_basis_reduction.bounds import full_backward_check, full_backward_output_bound
from code_basis_reduction.exceptions import SelectionFailure, UsageError
from code_basis_reduction.gf import GF2, FieldSpec
from code_basis_reduction.linalg import CodeBasis, k1
from tests.fixtures import make_code, make_shuffled_code, naive_eta, small_codes


class RedundantSetTestCase(TestCase):
    def setUp(self) -> None:
        self.basis = CodeBasis.from_matrix(
            GF2,
            [
                [0, 1, 1, 1, 1],
                [1, 0, 1, 1, 0],
            ],
        )

    def test_ties_go_to_the_smallest_normalized_column(self):
        # columns 1, 4 are (1, 0) and columns 2, 3 are (1, 1)
        redundant = max_redundant_set(self.basis)
        self.assertEqual(redundant.coords, (1, 4))
        self.assertEqual(redundant.scalars, (1, 1))
        self.assertEqual(eta(self.basis), 2)

    def test_scalars_relate_every_member_to_the_first(self):
        field = FieldSpec.from_order(3)
        basis = CodeBasis.from_matrix(field, [[1, 0, 2, 1], [0, 1, 0, 0]])
        redundant = max_redundant_set(basis)
        self.assertEqual(redundant.coords, (0, 2, 3))
        self.assertEqual(redundant.scalars, (1, 2, 1))

    def test_empty_inputs_are_rejected(self):
        with self.assertRaises(UsageError):
            max_redundant_set(CodeBasis(GF2, 4, []))

    def test_pigeonhole_lower_bound(self):
        self.assertEqual(eta_lower_bound(2, 3, 14), 2)
        self.assertEqual(eta_lower_bound(3, 2, 9), 3)
        self.assertEqual(eta_lower_bound(2, 10, 20), 1)

    def _check_against_pairwise_oracle(self, basis: CodeBasis) -> None:
        expected = naive_eta(basis)
        self.assertEqual(eta(basis), expected)
        lower = eta_lower_bound(basis.field.q, basis.k, basis.support_size())
        self.assertGreaterEqual(expected, lower)
        reduced = basis.copy()
        reduced.apply_block_transform(0, basis.k, backward_reduce(basis))
        self.assertEqual(reduced.length(basis.k - 1), expected)
        self.assertTrue(reduced.is_proper())
        self.assertTrue(reduced.same_code(basis))
        self.assertTrue(is_backward_reduced(reduced))

    @settings(max_examples=100, deadline=None)
    @given(small_codes(fields=(2, 3, 4, 5), max_n=40, max_k=10))
    def test_redundant_set_and_backward_reduction_match_the_pairwise_oracle(self, basis):
        self._check_against_pairwise_oracle(basis)

    @pytest.mark.slow
    @settings(max_examples=500, deadline=None)
    @given(small_codes(fields=(2, 3, 4, 5), max_n=40, max_k=10))
    def test_pairwise_oracle_agreement_on_five_hundred_codes(self, basis):
        self._check_against_pairwise_oracle(basis)


class BackwardReductionTestCase(TestCase):
    def test_first_row_touching_the_redundant_set_moves_to_the_end(self):
        basis = CodeBasis.from_matrix(GF2, [[0, 1, 1, 1, 1], [1, 0, 1, 1, 0]])
        self.assertEqual(basis.profile(), [4, 1])
        self.assertFalse(is_backward_reduced(basis))
        basis.apply_block_transform(0, 2, backward_reduce(basis))
        self.assertEqual(basis.matrix(), [[1, 0, 1, 1, 0], [0, 1, 1, 1, 1]])
        self.assertEqual(basis.profile(), [3, 2])

    def test_improper_basis_is_rejected(self):
        basis = CodeBasis.from_matrix(GF2, [[1, 1, 0], [1, 1, 0]])
        with self.assertRaises(UsageError):
            backward_reduce(basis)

    def test_default_threshold_is_three_times_the_log(self):
        self.assertEqual(default_tau(2, 1280), 33)
        self.assertEqual(default_tau(2, 1024), 30)
        self.assertEqual(default_tau(3, 10), 9)
        self.assertEqual(default_tau(2, 1), 1)


class FullBackwardReductionTestCase(TestCase):
    @settings(max_examples=60, deadline=None)
    @given(small_codes(max_n=24, max_k=8))
    def test_every_prefix_up_to_tau_ends_up_backward_reduced(self, basis):
        tau = min(default_tau(basis.field.q, basis.n), basis.k)
        reduced = full_backward_reduce(basis, tau)
        self.assertTrue(is_fully_backward_reduced(reduced, tau))
        self.assertTrue(reduced.same_code(basis))
        self.assertEqual(sum(reduced.profile()), basis.support_size())

    def _check_griesmer_type_inequality(self, instance: int) -> None:
        q = (2, 3, 4)[instance % 3]
        n = 16 + 4 * (instance % 16)
        basis = make_shuffled_code(q, n // 2, n, instance)
        # ceil(log_q n)
        tau = min(max(1, default_tau(q, n) // 3), basis.k)
        reduced = full_backward_reduce(basis, tau)
        self.assertTrue(
            full_backward_check(reduced.profile(), q, n, basis.k, tau), (q, n, instance)
        )
        self.assertLessEqual(reduced.length(0), full_backward_output_bound(q, n, basis.k, tau))

    def test_griesmer_type_inequality_holds_with_a_logarithmic_threshold(self):
        for instance in range(45):
            self._check_griesmer_type_inequality(instance)

    @pytest.mark.slow
    def test_griesmer_type_inequality_on_two_hundred_instances(self):
        for instance in range(200):
            self._check_griesmer_type_inequality(instance)

    def test_input_basis_is_left_untouched(self):
        basis = make_code(2, 6, 14, seed=4)
        before = basis.matrix()
        full_backward_reduce(basis, 4)
        self.assertEqual(basis.matrix(), before)

    def test_threshold_out_of_range_is_rejected(self):
        basis = make_code(2, 3, 8)
        with self.assertRaises(UsageError):
            full_backward_reduce(basis, 4)
        with self.assertRaises(UsageError):
            is_fully_backward_reduced(basis, 0)


class SelectiveBackwardReductionTestCase(TestCase):
    def test_block_width_must_divide_the_redundancy(self):
        basis = make_code(2, 4, 10, systematic=False)
        with self.assertRaises(UsageError):
            selective_backward_reduce(basis, 4)
        with self.assertRaises(UsageError):
            selective_backward_reduce(basis, 1)

    def test_information_set_beyond_the_first_columns_is_a_selection_failure(self):
        basis = CodeBasis.from_matrix(GF2, [[1, 0, 0, 0, 0, 0], [0, 0, 0, 0, 1, 0]])
        with self.assertRaises(SelectionFailure) as context:
            selective_backward_reduce(basis, 2)
        self.assertTrue(context.exception.retryable)

    def test_reduced_random_codes_keep_the_code_and_stay_proper(self):
        successes = 0
        for seed in range(8):
            basis = make_code(2, 32, 64, seed, systematic=False)
            try:
                reduced = selective_backward_reduce(basis, 8)
            except SelectionFailure:
                continue
            successes += 1
            self.assertTrue(reduced.is_proper())
            self.assertTrue(reduced.same_code(basis))
            self.assertEqual(sum(reduced.profile()), basis.support_size())
        self.assertGreater(successes, 0)

    @pytest.mark.slow
    def test_most_runs_reach_ten_long_epipodal_vectors(self):
        runs, hits = 0, 0
        for seed in range(50):
            for attempt in range(20):
                basis = make_code(2, 128, 256, [seed, attempt], systematic=False)
                try:
                    reduced = selective_backward_reduce(basis, 16)
                except SelectionFailure:
                    continue
                self.assertTrue(reduced.is_proper())
                self.assertTrue(reduced.same_code(basis))
                runs += 1
                hits += k1(reduced.profile()) >= 10
                break
        self.assertGreaterEqual(hits, 0.8 * runs)
