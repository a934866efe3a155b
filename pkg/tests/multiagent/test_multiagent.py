import math
import unittest
from fractions import Fraction

from contractlab.core.exceptions import CapExceededError, GadgetConstructionError, PreconditionError
from contractlab.gadgets.hidden_set import hidden_set_instance
from contractlab.gadgets.pseudosymmetric import pseudosymmetric_instance
from contractlab.gadgets.submodular import multiagent_submodular_gadget, planted_cover_coverage
from contractlab.models.itemset import ItemSet
from contractlab.models.multiagent import (
    MultiAgentInstance,
    PseudoSymmetricFn,
    PseudoSymmetricSpec,
    equilibrium_payments,
    objective_g,
    ptas_candidates,
    solve_exact,
    solve_ptas_pseudosymmetric,
    verify_equilibrium,
)
from contractlab.models.setfn import AdditiveFn, TableFn


class TestEquilibrium(unittest.TestCase):

    def setUp(self) -> None:
        super().setUp()
        self.instance = MultiAgentInstance(
            costs=(Fraction(3, 50), Fraction(1, 10)),
            f=AdditiveFn([Fraction(3, 10), Fraction(1, 2)]),
        )
        self.both = ItemSet.full(2)

    def test_payments(self):
        assert equilibrium_payments(self.instance, self.both) == (Fraction(1, 5), Fraction(1, 5))
        only_second = equilibrium_payments(self.instance, ItemSet.from_one_based([2], 2))
        assert only_second == (0, Fraction(1, 5))

    def test_zero_costs_pay_nothing(self):
        free = MultiAgentInstance(costs=(0, 0), f=self.instance.f)
        assert equilibrium_payments(free, self.both) == (0, 0)

    def test_objective(self):
        assert objective_g(self.instance, self.both) == Fraction(12, 25)
        assert objective_g(self.instance, ItemSet.empty(2)) == 0

    def test_verify_equilibrium(self):
        assert verify_equilibrium(self.instance, [Fraction(1, 5), Fraction(1, 5)], self.both)
        assert verify_equilibrium(self.instance, [0, 0], ItemSet.empty(2))
        assert not verify_equilibrium(self.instance, [Fraction(1, 10), Fraction(1, 5)], self.both)

    def test_cheaper_payment_breaks_equilibrium(self):
        payments = list(equilibrium_payments(self.instance, self.both))
        for i in range(2):
            lowered = list(payments)
            lowered[i] -= Fraction(1, 10 ** 6)
            assert not verify_equilibrium(self.instance, lowered, self.both)

    def test_zero_marginal_needs_infinite_payment(self):
        instance = MultiAgentInstance(costs=(Fraction(1, 10), Fraction(1, 10)), f=TableFn([0, 1, 1, 1]))
        payments = equilibrium_payments(instance, ItemSet.full(2))
        assert payments == (math.inf, math.inf)
        assert objective_g(instance, ItemSet.full(2)) == -math.inf
        assert not verify_equilibrium(instance, payments, ItemSet.full(2))


class TestSolveExact(unittest.TestCase):

    def test_additive_example(self):
        instance = MultiAgentInstance(
            costs=(Fraction(3, 50), Fraction(1, 10)),
            f=AdditiveFn([Fraction(3, 10), Fraction(1, 2)]),
        )
        solution = solve_exact(instance)
        assert solution.S == ItemSet.full(2)
        assert solution.objective == Fraction(12, 25)
        assert verify_equilibrium(instance, solution.payments, solution.S)

    def test_expensive_agents_stay_idle(self):
        instance = MultiAgentInstance(costs=(1, 1), f=AdditiveFn([Fraction(1, 2), Fraction(1, 2)]))
        solution = solve_exact(instance)
        assert solution.S == ItemSet.empty(2)
        assert solution.objective == 0

    def test_size_cap(self):
        instance = MultiAgentInstance(
            costs=(Fraction(3, 50), Fraction(1, 10)),
            f=AdditiveFn([Fraction(3, 10), Fraction(1, 2)]),
        )
        solution = solve_exact(instance, size_cap=1)
        assert solution.S == ItemSet.from_one_based([2], 2)
        assert solution.objective == Fraction(2, 5)

    def test_dominates_every_set(self):
        instance = pseudosymmetric_instance(7, seed=5)
        solution = solve_exact(instance)
        for bits in range(1 << instance.n):
            assert solution.objective >= objective_g(instance, ItemSet(bits, instance.n))

    def test_planted_cover_optimum(self):
        cover = planted_cover_coverage(2)
        instance = multiagent_submodular_gadget(2, cover.function)
        solution = solve_exact(instance)
        assert solution.objective == Fraction(1, 2)

    def test_planted_cover_bound_on_every_set(self):
        k = 2
        instance = multiagent_submodular_gadget(k, planted_cover_coverage(k, 2).function)
        for bits in range(1 << instance.n):
            T = ItemSet(bits, instance.n)
            size = len(T)
            assert objective_g(instance, T) <= (1 - Fraction(size, 2 * k)) * Fraction(size, k)

    def test_enumeration_cap(self):
        instance = MultiAgentInstance(costs=(0,) * 30, f=AdditiveFn([0] * 30))
        with self.assertRaises(CapExceededError):
            solve_exact(instance)


class TestHiddenSetObjective(unittest.TestCase):

    def test_cube_27_reaches_m_over_2n(self):
        instance = hidden_set_instance(27, good=ItemSet.from_one_based([1, 2, 3], 27))
        good = instance.f.good
        assert all(a == Fraction(1, 6) for i, a in enumerate(equilibrium_payments(instance, good)) if i in good)
        assert objective_g(instance, good) == Fraction(1, 18)

    def test_cube_8_value(self):
        instance = hidden_set_instance(8, good=ItemSet.from_one_based([1, 2], 8))
        assert math.isclose(objective_g(instance, instance.f.good), (2 - math.sqrt(2)) / 16, abs_tol=1e-12)


class TestPseudoSymmetric(unittest.TestCase):

    def test_candidate_family_size(self):
        instance = MultiAgentInstance(costs=tuple(range(1, 7)), f=AdditiveFn([Fraction(1, 6)] * 6))
        assert len(ptas_candidates(instance, 1)) == 26

    def test_symmetric_ptas_is_exact(self):
        for seed in range(5):
            instance = pseudosymmetric_instance(8, seed=seed, symmetric=True)
            assert solve_ptas_pseudosymmetric(instance, Fraction(1, 2)).objective == solve_exact(instance).objective

    def test_ptas_guarantee(self):
        for seed in range(8):
            instance = pseudosymmetric_instance(9, seed=seed)
            optimum = solve_exact(instance).objective
            for epsilon in (Fraction(1, 4), Fraction(1, 2)):
                assert solve_ptas_pseudosymmetric(instance, epsilon).objective >= (1 - epsilon) * optimum

    def test_ptas_needs_pseudosymmetric_function(self):
        instance = MultiAgentInstance(costs=(0, 0), f=AdditiveFn([1, 1]))
        with self.assertRaises(PreconditionError):
            solve_ptas_pseudosymmetric(instance, Fraction(1, 2))

    def test_ptas_rejects_non_submodular_bonus(self):
        f = PseudoSymmetricFn((0, Fraction(1, 4), Fraction(1, 2)), ItemSet.full(2), Fraction(1, 4))
        instance = MultiAgentInstance(costs=(Fraction(1, 100), Fraction(1, 100)), f=f)
        with self.assertRaises(PreconditionError):
            solve_ptas_pseudosymmetric(instance, Fraction(1, 2))

    def test_generated_function_yields_valid_spec(self):
        f = pseudosymmetric_instance(6, seed=2).f
        spec = f.spec()
        assert spec.special_set == f.special_set
        assert spec.bonus == f.bonus

    def test_invalid_specs(self):
        with self.assertRaises(GadgetConstructionError):
            PseudoSymmetricSpec(profile=(0, Fraction(1, 2), Fraction(1, 4)),
                                special_set=ItemSet.full(2), bonus=0)
        with self.assertRaises(GadgetConstructionError):
            PseudoSymmetricSpec(profile=(0, Fraction(1, 2), 1),
                                special_set=ItemSet.full(2), bonus=Fraction(1, 2))
