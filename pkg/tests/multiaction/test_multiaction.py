import unittest
from fractions import Fraction

import networkx as nx
import numpy as np

from contractlab.core.exceptions import InvalidInstanceError, PreconditionError
from contractlab.gadgets.clique import clique_xos_instance
from contractlab.gadgets.submodular import multiaction_submodular_gadget, planted_cover_coverage
from contractlab.models.itemset import ItemSet
from contractlab.models.multiaction import (
    MultiActionInstance,
    agent_best_response,
    agent_utility,
    breakpoints,
    envelope_response,
    principal_utility,
    principal_utility_grid,
    solve_exact,
    upper_envelope,
)
from contractlab.models.setfn import AdditiveFn, CoverageFn, TableFn


def _two_actions():
    return MultiActionInstance(
        costs=(Fraction(1, 10), Fraction(1, 10)),
        f=AdditiveFn([Fraction(2, 5), Fraction(2, 5)]),
    )


def _random_instance(rng: np.random.Generator) -> MultiActionInstance:
    n = int(rng.integers(1, 6))
    universe = int(rng.integers(2, 9))
    covers = [[int(u) for u in rng.choice(universe, size=int(rng.integers(1, universe + 1)), replace=False)]
              for _ in range(n)]
    costs = tuple(Fraction(int(c), 40) for c in rng.integers(0, 11, size=n))
    return MultiActionInstance(costs=costs, f=CoverageFn.from_element_lists(universe, covers))


class TestBestResponse(unittest.TestCase):

    def test_two_actions(self):
        instance = _two_actions()
        assert agent_best_response(instance, Fraction(1, 5)) == ItemSet.empty(2)
        # every set has utility 0 at 1/4, ties go to the larger f
        assert agent_best_response(instance, Fraction(1, 4)) == ItemSet.full(2)

    def test_triangle_gadget_takes_the_triangle(self):
        instance, gadget = clique_xos_instance(nx.complete_graph(3), 1, Fraction(1, 2))
        S = agent_best_response(instance, Fraction(7, 8))
        assert len(S) == 3
        assert gadget.is_clique(S)

    def test_best_response_dominates(self):
        rng = np.random.default_rng(21)
        for _ in range(15):
            instance = _random_instance(rng)
            alpha = Fraction(int(rng.integers(0, 101)), 100)
            chosen = agent_utility(instance, agent_best_response(instance, alpha), alpha)
            for bits in range(1 << instance.n):
                assert chosen >= agent_utility(instance, ItemSet(bits, instance.n), alpha)

    def test_alpha_outside_unit_interval(self):
        with self.assertRaises(PreconditionError):
            agent_best_response(_two_actions(), Fraction(3, 2))
        with self.assertRaises(PreconditionError):
            principal_utility(_two_actions(), -1)


class TestBreakpoints(unittest.TestCase):

    def test_two_actions(self):
        assert breakpoints(_two_actions()) == [0, Fraction(1, 4), 1]

    def test_single_action(self):
        cheap = MultiActionInstance(costs=(Fraction(1, 5),), f=AdditiveFn([Fraction(1, 2)]))
        assert breakpoints(cheap) == [0, Fraction(2, 5), 1]
        costly = MultiActionInstance(costs=(1,), f=AdditiveFn([Fraction(1, 2)]))
        assert breakpoints(costly) == [0, 1]

    def test_triangle_gadget_endpoints(self):
        instance, _ = clique_xos_instance(nx.complete_graph(3), 1, Fraction(1, 2))
        found = breakpoints(instance)
        assert Fraction(7, 11) in found
        assert Fraction(7, 8) in found

    def test_real_mode_breakpoints(self):
        instance = MultiActionInstance(costs=(0.1, 0.1), f=AdditiveFn([0.4, 0.4]), numeric="real")
        found = breakpoints(instance)
        assert len(found) == 3
        assert abs(found[1] - 0.25) < 1e-9


class TestSolveExact(unittest.TestCase):

    def test_two_actions(self):
        solution = solve_exact(_two_actions())
        assert solution.alpha == Fraction(1, 4)
        assert solution.best_response == ItemSet.full(2)
        assert solution.principal_utility == Fraction(3, 5)

    def test_triangle_gadget(self):
        instance, _ = clique_xos_instance(nx.complete_graph(3), 1, Fraction(1, 2))
        solution = solve_exact(instance)
        assert solution.alpha == Fraction(7, 11)
        assert solution.principal_utility == 4
        assert principal_utility(instance, Fraction(7, 8)) == Fraction(27, 8)
        assert principal_utility(instance, Fraction(1, 2)) == 0
        assert principal_utility(instance, 1) == 0

    def test_anchored_cover_gadget(self):
        beta = Fraction(1, 20)
        instance = multiaction_submodular_gadget(2, planted_cover_coverage(2).function, beta)
        below = 1 - beta ** 2 - Fraction(1, 1000)
        assert agent_best_response(instance, below) == ItemSet.empty(instance.n)
        assert instance.f.value(agent_best_response(instance, 1 - beta ** 2)) >= Fraction(1, 2)
        assert solve_exact(instance).alpha < 1 - beta ** 3

    def test_matches_grid_oracle(self):
        rng = np.random.default_rng(8)
        grid = np.linspace(0.0, 1.0, 2001)
        for _ in range(15):
            instance = _random_instance(rng)
            optimum = solve_exact(instance).principal_utility
            values = principal_utility_grid(instance, grid)
            assert values.max() <= float(optimum) + 1e-9
            for alpha in breakpoints(instance):
                assert principal_utility(instance, alpha) <= optimum

    def test_real_and_rational_agree(self):
        exact = _two_actions()
        real = MultiActionInstance(costs=exact.costs, f=exact.f, numeric="real")
        assert abs(solve_exact(real).principal_utility - 0.6) < 1e-9
        assert abs(solve_exact(real).alpha - 0.25) < 1e-9

    def test_rational_mode_needs_rational_data(self):
        with self.assertRaises(InvalidInstanceError):
            MultiActionInstance(costs=(0.1,), f=AdditiveFn([0.5]), numeric="rational")


class TestEnvelope(unittest.TestCase):

    def test_segments_agree_with_best_response(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            instance = _random_instance(rng)
            segments = upper_envelope(instance)
            for k in range(101):
                alpha = Fraction(k, 100)
                segment = envelope_response(segments, alpha)
                assert segment.best_response == agent_best_response(instance, alpha)

    def test_agent_optimum_is_convex_and_non_decreasing(self):
        instance = MultiActionInstance(costs=(Fraction(1, 4), Fraction(1, 8), 0),
                                       f=TableFn([0, Fraction(1, 2), Fraction(1, 4), Fraction(3, 5),
                                                  Fraction(1, 10), Fraction(1, 2), Fraction(2, 5), 1]))
        grid = breakpoints(instance)
        best = [agent_utility(instance, agent_best_response(instance, a), a) for a in grid]
        assert all(b >= a for a, b in zip(best, best[1:]))
        slopes = [(best[i + 1] - best[i]) / (grid[i + 1] - grid[i]) for i in range(len(grid) - 1)]
        assert all(b >= a for a, b in zip(slopes, slopes[1:]))
