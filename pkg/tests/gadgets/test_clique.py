import unittest
from fractions import Fraction

import networkx as nx

from contractlab.core.exceptions import GadgetConstructionError, PreconditionError
from contractlab.gadgets.clique import CliqueGadgetFn, clique_constants, clique_xos_instance, xos_clause_value
from contractlab.models.itemset import ItemSet


class TestCliqueGadget(unittest.TestCase):

    def setUp(self) -> None:
        super().setUp()
        self.triangle = nx.complete_graph(3)
        self.instance, self.gadget = clique_xos_instance(self.triangle, 1, Fraction(1, 2))

    def test_constants(self):
        assert self.gadget.epsilon == 3
        assert self.gadget.M == 7
        assert self.gadget.n == 4
        assert clique_constants(3, 1, Fraction(1, 4)) == (7, 11)
        assert set(self.instance.costs) == {7}

    def test_values(self):
        assert self.gadget.value(self.gadget.added_clique) == 11
        assert self.gadget.value(ItemSet.full(4)) == 31

    def test_non_clique_value(self):
        path = nx.path_graph(4)
        gadget = CliqueGadgetFn(path, 2, Fraction(1, 2))
        S = ItemSet.from_one_based([1, 3, 4], gadget.n)
        assert not gadget.is_clique(S)
        assert gadget.value(S) == gadget.M * 3 + 2 * gadget.epsilon

    def test_table_matches_direct_evaluation(self):
        gadget = CliqueGadgetFn(nx.cycle_graph(5), 2, Fraction(1, 4))
        table = gadget.table()
        for bits in range(1 << gadget.n):
            assert table[bits] == gadget.value_bits(bits)

    def test_normalized_instance(self):
        instance, gadget = clique_xos_instance(self.triangle, 1, Fraction(1, 2), normalize=True)
        assert gadget.value(ItemSet.full(4)) == 1
        assert set(instance.costs) == {Fraction(7, 31)}
        assert instance.exact

    def test_invalid_parameters(self):
        with self.assertRaises(GadgetConstructionError):
            CliqueGadgetFn(self.triangle, 1, 1)
        with self.assertRaises(GadgetConstructionError):
            CliqueGadgetFn(self.triangle, 0, Fraction(1, 2))


class TestXosWitness(unittest.TestCase):

    def test_clause_examples(self):
        _, gadget = clique_xos_instance(nx.complete_graph(3), 1, Fraction(1, 2))
        edge = ItemSet.from_one_based([1, 2], 4)
        assert xos_clause_value(gadget, edge, ItemSet.from_one_based([1], 4)) == Fraction(19, 2)
        assert xos_clause_value(gadget, edge, ItemSet.from_one_based([3, 4], 4)) == 0

    def test_clauses_never_exceed_f(self):
        gadget = CliqueGadgetFn(nx.path_graph(3), 2, Fraction(1, 2))
        n = gadget.n
        for s in range(1, 1 << n):
            S = ItemSet(s, n)
            assert xos_clause_value(gadget, S, S) == gadget.value(S)
            for t in range(1, 1 << n):
                assert xos_clause_value(gadget, ItemSet(t, n), S) <= gadget.value(S)

    def test_empty_clause_index(self):
        _, gadget = clique_xos_instance(nx.complete_graph(3), 1, Fraction(1, 2))
        with self.assertRaises(PreconditionError):
            xos_clause_value(gadget, ItemSet.empty(4), ItemSet.full(4))
