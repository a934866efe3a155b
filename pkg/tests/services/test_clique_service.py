import unittest
from fractions import Fraction

import networkx as nx

from contractlab.core.exceptions import PreconditionError
from contractlab.gadgets.clique import clique_xos_instance
from contractlab.models import multiaction
from contractlab.models.multiaction import MultiActionInstance
from contractlab.models.setfn import AdditiveFn
from contractlab.services.clique_service import (
    CliqueService,
    CliqueVerdict,
    ContractOracle,
    approx_clique,
    classify,
    clique_report_document,
    degraded_oracle,
    distinguish,
    exact_oracle,
)
from contractlab.utils.graphs import graph_battery, max_clique_bruteforce


class TestMaxClique(unittest.TestCase):

    def test_examples(self):
        assert max_clique_bruteforce(nx.complete_graph(3))[0] == 3
        assert max_clique_bruteforce(nx.empty_graph(5))[0] == 1
        assert max_clique_bruteforce(nx.cycle_graph(5))[0] == 2
        assert max_clique_bruteforce(nx.empty_graph(0)) == (0, [])

    def test_agrees_with_networkx(self):
        for graph in graph_battery(15, 9, seed=5):
            omega, clique = max_clique_bruteforce(graph)
            assert omega == max(len(c) for c in nx.find_cliques(graph))
            assert all(graph.has_edge(u, v) for u in clique for v in clique if u < v)


class TestDistinguish(unittest.TestCase):

    def test_small_and_large(self):
        assert distinguish(nx.empty_graph(5), 2, Fraction(1, 2), exact_oracle()) == CliqueVerdict.SMALL
        assert distinguish(nx.complete_graph(8), 1, Fraction(1, 2), exact_oracle()) == CliqueVerdict.LARGE

    def test_oracles_split_on_the_triangle(self):
        triangle = nx.complete_graph(3)
        beta = Fraction(1, 2)
        exact = CliqueService(exact_oracle(), beta).run(triangle, 1)
        degraded = CliqueService(degraded_oracle(beta), beta).run(triangle, 1)
        assert exact.alpha == Fraction(7, 11)
        assert exact.verdict == CliqueVerdict.SMALL
        assert degraded.alpha == Fraction(7, 8)
        assert degraded.verdict == CliqueVerdict.LARGE

    def test_degraded_oracle_honors_its_ratio(self):
        beta = Fraction(1, 2)
        oracle = degraded_oracle(beta)
        for graph in graph_battery(6, 6, seed=2):
            for delta in (1, 2):
                instance, _ = clique_xos_instance(graph, delta, beta)
                optimum = multiaction.solve_exact(instance).principal_utility
                assert multiaction.principal_utility(instance, oracle.solve(instance)) >= beta * optimum

    def test_degraded_oracle_needs_the_gadget(self):
        instance = MultiActionInstance(costs=(0,), f=AdditiveFn([1]))
        with self.assertRaises(PreconditionError):
            degraded_oracle(Fraction(1, 2)).solve(instance)

    def test_threshold_is_exact(self):
        M = Fraction(7)
        assert classify(Fraction(7, 8), M) == CliqueVerdict.LARGE
        assert classify(Fraction(7, 8) - Fraction(1, 10 ** 9), M) == CliqueVerdict.SMALL
        assert classify(Fraction(7, 8) + Fraction(1, 10 ** 9), M) == CliqueVerdict.LARGE

    def test_oracle_alpha_outside_unit_interval(self):
        broken = ContractOracle(name="broken", solve=lambda instance: Fraction(2), beta=Fraction(1, 2))
        with self.assertRaises(PreconditionError):
            CliqueService(broken, Fraction(1, 2)).run(nx.complete_graph(2), 1)

    def test_beta_range(self):
        with self.assertRaises(PreconditionError):
            CliqueService(exact_oracle(), 1)


class TestApproxClique(unittest.TestCase):

    def test_examples(self):
        beta = Fraction(1, 2)
        assert approx_clique(nx.empty_graph(5), beta, exact_oracle()) == 1
        assert approx_clique(nx.empty_graph(1), beta, exact_oracle()) == 1
        estimate = approx_clique(nx.complete_graph(8), beta, exact_oracle())
        assert estimate in (1, 2, 4, 8)

    def test_guarantee_on_battery(self):
        for beta in (Fraction(1, 4), Fraction(1, 2)):
            service = CliqueService(exact_oracle(), beta)
            for graph in graph_battery(8, 7, seed=13):
                omega, _ = max_clique_bruteforce(graph)
                estimate = service.approx_clique(graph)
                assert beta ** 2 / 4 * omega <= estimate <= omega

    def test_normalized_gadget_gives_same_verdicts(self):
        graph = nx.cycle_graph(5)
        plain = CliqueService(exact_oracle(), Fraction(1, 2)).approximate(graph)
        scaled = CliqueService(exact_oracle(), Fraction(1, 2), normalize=True).approximate(graph)
        assert plain.verdicts == scaled.verdicts

    def test_report_document(self):
        oracle = exact_oracle()
        approximation = CliqueService(oracle, Fraction(1, 2)).approximate(nx.complete_graph(4))
        document = clique_report_document(approximation, oracle, Fraction(1, 2))
        assert document.omega_estimate == approximation.estimate
        assert set(document.verdicts) == {"1", "2", "4"}
        assert document.beta == "1/2"
        assert document.oracle == "exact"

    def test_empty_graph_is_rejected(self):
        with self.assertRaises(PreconditionError):
            CliqueService(exact_oracle(), Fraction(1, 2)).approximate(nx.empty_graph(0))
