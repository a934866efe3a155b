import unittest
from fractions import Fraction

from contractlab.core.exceptions import CapExceededError, GadgetConstructionError
from contractlab.gadgets.kprover import (
    Formula3CNF5,
    KProverParams,
    greedy_codebook,
    kprover_coverage,
    singleton_value,
    verify_block_claims,
)
from contractlab.models.itemset import ItemSet


class TestFormula(unittest.TestCase):

    def test_random_planted_is_satisfied(self):
        formula, assignment = Formula3CNF5.random_planted(6, seed=4)
        assert formula.n_clauses == 10
        assert formula.satisfies(assignment)

    def test_occurrence_rule(self):
        with self.assertRaises(GadgetConstructionError):
            Formula3CNF5(n_vars=3, clauses=((1, 2, 3),) * 4)
        with self.assertRaises(GadgetConstructionError):
            Formula3CNF5(n_vars=3, clauses=((1, 1, 2),) * 5)


class TestCodebook(unittest.TestCase):

    def test_smallest_codebook(self):
        assert greedy_codebook(2, 2) == ("10", "01")

    def test_invalid_codebooks(self):
        with self.assertRaises(GadgetConstructionError):
            KProverParams(k=2, ell=2, codewords=("11", "00"))
        with self.assertRaises(GadgetConstructionError):
            KProverParams(k=2, ell=3, codewords=("100", "010"))


class TestKProverCoverage(unittest.TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        cls.formula, cls.assignment = Formula3CNF5.random_planted(3, seed=0)
        cls.cov = kprover_coverage(cls.formula, KProverParams.with_greedy_codebook(2, 2))

    def test_sizes(self):
        assert self.cov.question_count == 15
        assert self.cov.k_prime == 30
        assert self.cov.randomness_count == 225
        assert self.cov.L == 4
        assert self.cov.function.universe_size == 3600

    def test_every_item_is_worth_one_over_k_prime(self):
        f = self.cov.function
        assert singleton_value(self.cov) == Fraction(1, 30)
        for i in range(f.n):
            assert f.value(ItemSet.from_indices([i], f.n)) == Fraction(1, 30)

    def test_planted_set_covers_everything(self):
        S = self.cov.planted_set(self.assignment)
        assert len(S) == 30
        assert self.cov.function.value(S) == 1

    def test_block_unions(self):
        assert self.cov.block(0, 0, 0).bit_count() == 8
        assert (self.cov.block(3, 0, 0) | self.cov.block(3, 1, 1)).bit_count() == 12
        family = 0
        for j in range(4):
            family |= self.cov.block(7, j, j % 2)
        assert family.bit_count() == 15

    def test_block_claims(self):
        report = verify_block_claims(self.cov, samples=40, seed=9)
        assert report.passed
        assert report.unions_checked == 40

    def test_universe_cap(self):
        with self.assertRaises(CapExceededError):
            kprover_coverage(self.formula, KProverParams.with_greedy_codebook(2, 2), cap=1000)
