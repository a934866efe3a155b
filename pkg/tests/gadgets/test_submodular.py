import unittest
from fractions import Fraction

import numpy as np

from contractlab.core.exceptions import GadgetConstructionError
from contractlab.gadgets.pseudosymmetric import pseudosymmetric_instance, random_pseudosymmetric_spec
from contractlab.gadgets.submodular import (
    anchored_coverage,
    coverage_gap_report,
    multiaction_submodular_gadget,
    multiagent_submodular_gadget,
    planted_cover_coverage,
)
from contractlab.models.itemset import ItemSet
from contractlab.models.setfn import CoverageFn, check_classes


class TestPlantedCover(unittest.TestCase):

    def test_two_blocks(self):
        cover = planted_cover_coverage(2, 0)
        assert cover.function.n == 2
        assert cover.function.value(cover.planted) == 1
        assert cover.function.value(ItemSet.from_indices([0], 2)) == Fraction(1, 2)

    def test_three_blocks(self):
        cover = planted_cover_coverage(3, 2)
        f = cover.function
        assert f.n == 3 + 6
        assert f.value(ItemSet.from_indices([0, 2], f.n)) == Fraction(2, 3)
        for i in range(f.n):
            assert f.value(ItemSet.from_indices([i], f.n)) == Fraction(1, 3)
        assert check_classes(f).submodular

    def test_invalid_parameters(self):
        with self.assertRaises(GadgetConstructionError):
            planted_cover_coverage(0)
        with self.assertRaises(GadgetConstructionError):
            planted_cover_coverage(2, -1)


class TestMultiAgentGadget(unittest.TestCase):

    def test_uniform_costs(self):
        instance = multiagent_submodular_gadget(2, planted_cover_coverage(2).function)
        assert set(instance.costs) == {Fraction(1, 8)}

    def test_rejects_unbalanced_singletons(self):
        lopsided = CoverageFn.from_element_lists(4, [[0, 1], [2]])
        with self.assertRaises(GadgetConstructionError):
            multiagent_submodular_gadget(2, lopsided)


class TestMultiActionGadget(unittest.TestCase):

    def test_costs(self):
        instance = multiaction_submodular_gadget(2, planted_cover_coverage(2).function, Fraction(1, 20))
        assert instance.costs[-1] == Fraction(7999, 16000)
        assert set(instance.costs[:-1]) == {Fraction(399, 1600)}
        assert instance.exact

    def test_beta_range(self):
        with self.assertRaises(GadgetConstructionError):
            multiaction_submodular_gadget(2, planted_cover_coverage(2).function, Fraction(1, 12))

    def test_anchored_coverage_matches_formula(self):
        fprime = planted_cover_coverage(3, 1).function
        f = anchored_coverage(fprime)
        anchor = fprime.n
        for bits in range(1 << f.n):
            S = ItemSet(bits, f.n)
            inner = ItemSet(bits & ~(1 << anchor), fprime.n)
            expected = (fprime.value(inner) + (1 if anchor in S else 0)) / 2
            assert f.value(S) == expected


class TestCoverageGap(unittest.TestCase):

    def test_report_rows(self):
        rows = coverage_gap_report(planted_cover_coverage(2, 1).function, 2, 2, 0.01)
        assert [row.size for row in rows] == [1, 2, 3]
        assert rows[1].best_value == 1
        assert not rows[1].holds


class TestPseudoSymmetricGenerator(unittest.TestCase):

    def test_specs_are_valid(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            spec = random_pseudosymmetric_spec(6, rng)
            report = check_classes(spec.function())
            assert report.monotone and report.submodular
            assert spec.function().value(ItemSet.full(6)) <= 1

    def test_symmetric_has_no_bonus(self):
        instance = pseudosymmetric_instance(5, seed=1, symmetric=True)
        assert instance.f.bonus == 0
        assert instance.exact

    def test_rejects_non_positive_n(self):
        for n in (0, -1):
            with self.assertRaises(GadgetConstructionError):
                pseudosymmetric_instance(n, seed=1)
            with self.assertRaises(GadgetConstructionError):
                random_pseudosymmetric_spec(n, np.random.default_rng(1))
