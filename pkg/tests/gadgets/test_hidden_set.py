import math
import unittest
from fractions import Fraction

from contractlab.core.exceptions import GadgetConstructionError
from contractlab.gadgets.hidden_set import (
    HiddenSetFn,
    count_pairs,
    cube_root,
    hidden_set_instance,
    hidden_set_objective_by_counts,
    is_successful_query,
)
from contractlab.models.itemset import ItemSet
from contractlab.models.setfn import check_classes


class TestHiddenSetFunction(unittest.TestCase):

    def setUp(self) -> None:
        super().setUp()
        self.good = ItemSet.from_one_based([1, 2], 8)
        self.f = HiddenSetFn(8, self.good)

    def test_cube_root(self):
        assert cube_root(8) == 2
        assert cube_root(512) == 8
        with self.assertRaises(GadgetConstructionError):
            cube_root(9)

    def test_values(self):
        assert self.f.value(self.good) == Fraction(1, 4)
        assert math.isclose(self.f.value(ItemSet.from_one_based([1, 2, 3], 8)), 3 / (8 * math.sqrt(2)))
        assert self.f.value(ItemSet.empty(8)) == 0

    def test_singletons_are_indistinguishable(self):
        values = {self.f.value(ItemSet.from_indices([i], 8)) for i in range(8)}
        assert len(values) == 1
        assert math.isclose(values.pop(), math.sqrt(2) / 8)

    def test_matches_xos_form(self):
        xos = self.f.as_xos()
        for bits in range(1 << 8):
            S = ItemSet(bits, 8)
            assert math.isclose(float(xos.value(S)), float(self.f.value(S)), abs_tol=1e-12)

    def test_is_monotone(self):
        assert check_classes(self.f).monotone

    def test_opacity_below_success(self):
        m, sqrt_m = 2, math.sqrt(2)
        other = HiddenSetFn(8, ItemSet.from_one_based([7, 8], 8))
        for bits in range(1 << 8):
            S = ItemSet(bits, 8)
            s, t = len(S), len(S.intersection(self.good))
            if s == 0 or s * s > 8 or t * t > m:
                continue
            expected = max(sqrt_m, s / sqrt_m) / 8
            assert math.isclose(float(self.f.value(S)), expected)
            if len(S.intersection(other.good)) ** 2 <= m:
                assert math.isclose(float(other.value(S)), expected)

    def test_rejects_wrong_hidden_set(self):
        with self.assertRaises(GadgetConstructionError):
            HiddenSetFn(8, ItemSet.from_one_based([1], 8))
        with self.assertRaises(GadgetConstructionError):
            HiddenSetFn(8, ItemSet.from_one_based([1, 2], 9))


class TestHiddenSetInstance(unittest.TestCase):

    def test_costs(self):
        instance = hidden_set_instance(27, seed=7)
        assert instance.n == 27
        assert set(instance.costs) == {Fraction(1, 162)}
        assert len(instance.f.good) == 3

    def test_seed_fixes_hidden_set(self):
        assert hidden_set_instance(64, seed=3).f.good == hidden_set_instance(64, seed=3).f.good

    def test_not_a_cube(self):
        with self.assertRaises(GadgetConstructionError):
            hidden_set_instance(10, seed=0)

    def test_objective_by_counts(self):
        instance = hidden_set_instance(64, good=ItemSet.from_indices(range(4), 64))
        table = hidden_set_objective_by_counts(instance)
        assert table[(4, 4)] == Fraction(1, 32)
        assert table[(0, 0)] == 0
        assert len(count_pairs(8)) == 21


class TestSuccessfulQuery(unittest.TestCase):

    def test_examples(self):
        good = ItemSet.from_one_based([1, 2], 8)
        assert is_successful_query(8, good, good)
        assert not is_successful_query(8, good, ItemSet.full(8))
        assert not is_successful_query(8, good, ItemSet.from_one_based([3, 4], 8))
