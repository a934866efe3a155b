"""
Property suites that check every structural claim of the toolkit by brute force or
Monte Carlo.

Each suite appends rows (suite, check, passed, observed, bound, detail) and
``VerificationService.run`` returns them as a pandas DataFrame. Every suite draws from
its own generator seeded by (seed, suite index), so a suite's rows do not depend on
which other suites ran.
"""
import logging
import math
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

import networkx as nx
import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from ..config.settings import settings
from ..core.exceptions import UnknownSuiteError
from ..core.numeric import approx_le, format_number
from ..gadgets.clique import clique_xos_instance, xos_clause_value
from ..gadgets.hidden_set import (
    HiddenSetFn,
    cube_root,
    draw_hidden_set,
    hidden_set_instance,
    hidden_set_objective_by_counts,
    is_successful_query,
)
from ..gadgets.kprover import Formula3CNF5, KProverParams, kprover_coverage, singleton_value, verify_block_claims
from ..gadgets.pseudosymmetric import pseudosymmetric_instance
from ..gadgets.submodular import (
    coverage_gap_report,
    multiaction_submodular_gadget,
    multiagent_submodular_gadget,
    planted_cover_coverage,
)
from ..models import multiaction, multiagent
from ..models.itemset import ItemSet
from ..models.multiaction import RATIONAL, MultiActionInstance
from ..models.multiagent import MultiAgentInstance
from ..models.setfn import AdditiveFn, CoverageFn, SetFunction, TableFn, XosFn, check_classes
from ..utils.bitmask import popcount_array
from ..utils.graphs import graph_battery, max_clique_bruteforce
from .clique_service import CliqueService, CliqueVerdict, classify, degraded_oracle, exact_oracle
from .estimation_service import EstimationService
from .instance_service import InstanceService

logger = logging.getLogger(__name__)

COLUMNS = ["suite", "check", "passed", "observed", "bound", "detail"]


class SuiteSizes(BaseModel):
    """Battery sizes; the defaults are the full acceptance runs."""

    random_functions: int = Field(default=100, ge=1)
    equilibrium_instances: int = Field(default=50, ge=1)
    exact_instances: int = Field(default=30, ge=1)
    ptas_instances: int = Field(default=100, ge=1)
    ptas_max_n: int = Field(default=12, ge=2)
    graphs: int = Field(default=50, ge=1)
    graph_max_vertices: int = Field(default=9, ge=1)
    alpha_samples: int = Field(default=5, ge=1)
    xos_graphs: int = Field(default=6, ge=1)
    grid_instances: int = Field(default=200, ge=1)
    grid_points: int = Field(default=10_000, ge=2)
    envelope_instances: int = Field(default=50, ge=1)
    random_sets: int = Field(default=100_000, ge=1)
    direct_checks: int = Field(default=200, ge=0)
    block_samples: int = Field(default=200, ge=1)
    mc_trials: int = Field(default=100_000, ge=1)
    inequality_step: float = Field(default=1e-4, gt=0)

    @classmethod
    def reduced(cls) -> "SuiteSizes":
        """Small batteries for quick runs."""
        return cls(
            random_functions=10, equilibrium_instances=6, exact_instances=4, ptas_instances=6,
            ptas_max_n=7, graphs=5, graph_max_vertices=6, alpha_samples=2, xos_graphs=2,
            grid_instances=6, grid_points=1000, envelope_instances=5, random_sets=2000,
            direct_checks=20, block_samples=20, mc_trials=8192, inequality_step=1e-3,
        )


def _text(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, float, Fraction)) and not isinstance(value, bool):
        return str(format_number(value))
    return str(value)


class _Rows:
    def __init__(self, suite: str):
        self.suite = suite
        self.rows: List[dict] = []

    def add(self, check: str, passed: bool, observed=None, bound=None, detail: str = "") -> None:
        self.rows.append({
            "suite": self.suite,
            "check": check,
            "passed": bool(passed),
            "observed": _text(observed),
            "bound": _text(bound),
            "detail": detail,
        })
        if not passed:
            logger.warning(f"[{self.suite}] {check} failed: observed={_text(observed)} bound={_text(bound)} {detail}")


def _fraction(rng: np.random.Generator, high: int, denominator: int, low: int = 0) -> Fraction:
    return Fraction(int(rng.integers(low, high + 1)), denominator)


def random_set_function(kind: str, n: int, rng: np.random.Generator) -> SetFunction:
    """Seeded rational set function of the given kind with values in [0, 1]."""
    if kind == "additive":
        return AdditiveFn([_fraction(rng, 20, 20 * n) for _ in range(n)])
    if kind == "coverage":
        universe = int(rng.integers(1, 13))
        covers = [int(rng.integers(0, 1 << universe)) for _ in range(n)]
        return CoverageFn(universe, covers)
    if kind == "xos":
        count = int(rng.integers(1, 5))
        return XosFn([[_fraction(rng, 20, 20 * n) for _ in range(n)] for _ in range(count)])
    if kind == "table":
        values = [Fraction(0)] + [_fraction(rng, 100, 100) for _ in range((1 << n) - 1)]
        return TableFn(values)
    raise ValueError(f"Unknown function kind {kind!r}")


def _random_kind(rng: np.random.Generator, kinds: Sequence[str]) -> str:
    return kinds[int(rng.integers(len(kinds)))]


def _random_multiagent(rng: np.random.Generator, n: int) -> MultiAgentInstance:
    f = random_set_function(_random_kind(rng, ("additive", "coverage", "xos")), n, rng)
    return MultiAgentInstance(costs=tuple(_fraction(rng, 10, 100 * n, low=1) for _ in range(n)), f=f)


def _random_multiaction(rng: np.random.Generator, n: int) -> MultiActionInstance:
    f = random_set_function(_random_kind(rng, ("additive", "coverage", "xos", "table")), n, rng)
    costs = tuple(_fraction(rng, 20, 100) for _ in range(n))
    return MultiActionInstance(costs=costs, f=f, numeric=RATIONAL)


def _all_sets(n: int) -> List[ItemSet]:
    return [ItemSet(bits, n) for bits in range(1 << n)]


class VerificationService:
    """
    Service class to run the property suites and report per-check outcomes.
    """

    def __init__(self, seed: Optional[int] = None, sizes: Optional[SuiteSizes] = None,
                 instance_service: Optional[InstanceService] = None):
        self.seed = settings.default_seed if seed is None else seed
        self.sizes = sizes or SuiteSizes()
        self.instance_service = instance_service or InstanceService()
        self.suites: Dict[str, Callable[[_Rows, np.random.Generator], None]] = {
            "set-function-classes": self._set_function_classes,
            "equilibrium-payments": self._equilibrium_payments,
            "multiagent-exact": self._multiagent_exact,
            "pseudo-symmetric-ptas": self._pseudo_symmetric_ptas,
            "planted-cover-multiagent": self._planted_cover_multiagent,
            "analytic-inequalities": self._analytic_inequalities,
            "hidden-set-identity": self._hidden_set_identity,
            "hidden-set-unsuccessful": self._hidden_set_unsuccessful,
            "hidden-set-opacity": self._hidden_set_opacity,
            "successful-query-rate": self._successful_query_rate,
            "clique-best-response": self._clique_best_response,
            "clique-xos-witness": self._clique_xos_witness,
            "clique-reduction": self._clique_reduction,
            "anchored-cover-multiaction": self._anchored_cover_multiaction,
            "multiaction-grid-oracle": self._multiaction_grid_oracle,
            "multiaction-envelope": self._multiaction_envelope,
            "prover-coverage": self._prover_coverage,
            "coverage-gap": self._coverage_gap,
        }

    @property
    def suite_names(self) -> List[str]:
        return list(self.suites)

    def run(self, suite: str = "all") -> pd.DataFrame:
        """
        Run one suite, or every suite for "all".

        Args:
            suite: suite name or "all"

        Returns:
            pd.DataFrame: one row per check with columns suite, check, passed, observed, bound, detail

        Raises:
            UnknownSuiteError: if the suite does not exist
        """
        if suite == "all":
            names = self.suite_names
        elif suite in self.suites:
            names = [suite]
        else:
            raise UnknownSuiteError(f"Unknown suite {suite!r}. Available: {['all'] + self.suite_names}")

        rows: List[dict] = []
        for name in names:
            recorder = _Rows(name)
            rng = np.random.default_rng([self.seed, self.suite_names.index(name)])
            self.suites[name](recorder, rng)
            failed = sum(not row["passed"] for row in recorder.rows)
            logger.info(f"Suite {name}: {len(recorder.rows) - failed}/{len(recorder.rows)} checks passed")
            rows.extend(recorder.rows)
        return pd.DataFrame(rows, columns=COLUMNS)

    @staticmethod
    def failures(frame: pd.DataFrame) -> pd.DataFrame:
        return frame[~frame["passed"]]

    @staticmethod
    def to_csv(frame: pd.DataFrame) -> str:
        return frame.to_csv(index=False, lineterminator="\n")

    def write_csv(self, frame: pd.DataFrame, path: str) -> None:
        self.instance_service.write_text(path, self.to_csv(frame), content_type="text/csv")

    # setfn

    def _set_function_classes(self, rows: _Rows, rng: np.random.Generator) -> None:
        count = self.sizes.random_functions
        coverage_ok = 0
        for _ in range(count):
            f = random_set_function("coverage", int(rng.integers(1, 11)), rng)
            coverage_ok += check_classes(f).submodular
        rows.add("coverage functions are submodular", coverage_ok == count, coverage_ok, count)

        additive_ok = 0
        for _ in range(count):
            report = check_classes(random_set_function("additive", int(rng.integers(1, 11)), rng))
            additive_ok += report.monotone and report.submodular
        rows.add("additive functions are monotone and submodular", additive_ok == count, additive_ok, count)

        report = check_classes(TableFn([0, 0, 0, 1]))
        witness = report.submodular_witness
        rows.add("complementary pair is not submodular",
                 not report.submodular and witness is not None and witness[0] == 0 and witness[1].bits == 0,
                 detail=f"witness={witness}")

        nonneg = empty_zero = dominance = demand_ok = telescoping = 0
        for _ in range(count):
            n = int(rng.integers(1, 9))
            kind = _random_kind(rng, ("additive", "coverage", "xos"))
            f = random_set_function(kind, n, rng)
            table = f.table()
            nonneg += bool((table.data >= 0).all())
            empty_zero += f.value(ItemSet.empty(n)) == 0

            S = ItemSet(int(rng.integers(0, 1 << n)), n)
            if isinstance(f, XosFn):
                clauses = f.clause_values(S)
                dominance += all(f.value(S) >= v for v in clauses) and f.value(S) in clauses
            else:
                dominance += 1

            prices = [_fraction(rng, 10, 20 * n) for _ in range(n)]
            demanded = f.demand(prices)
            surplus = f.value(demanded) - sum((prices[i] for i in demanded), Fraction(0))
            demand_ok += all(
                surplus >= f.value(T) - sum((prices[i] for i in T), Fraction(0)) for T in _all_sets(n)
            )

            order = list(S)
            rng.shuffle(order)
            running, total = ItemSet.empty(n), Fraction(0)
            for i in order:
                total += f.marginal(i, running)
                running = running.with_item(i)
            telescoping += total == f.value(S)
        rows.add("values are non-negative", nonneg == count, nonneg, count)
        rows.add("empty set has value 0", empty_zero == count, empty_zero, count)
        rows.add("XOS value dominates and attains its clauses", dominance == count, dominance, count)
        rows.add("demand set maximizes surplus", demand_ok == count, demand_ok, count)
        rows.add("marginals telescope to the value", telescoping == count, telescoping, count)

    # multiagent

    def _equilibrium_payments(self, rows: _Rows, rng: np.random.Generator) -> None:
        step = Fraction(1, 10 ** 9)
        stable = broken = checked = 0
        for _ in range(self.sizes.equilibrium_instances):
            inst = _random_multiagent(rng, int(rng.integers(1, 9)))
            S = ItemSet(int(rng.integers(1, 1 << inst.n)), inst.n)
            if any(inst.f.marginal(i, S.without_item(i)) <= 0 for i in S):
                continue
            checked += 1
            payments = multiagent.equilibrium_payments(inst, S)
            stable += multiagent.verify_equilibrium(inst, payments, S)
            broken += all(
                not multiagent.verify_equilibrium(inst, payments[:i] + (payments[i] - step,) + payments[i + 1:], S)
                for i in S
            )
        rows.add("equilibrium payments are stable", stable == checked, stable, checked)
        rows.add("lowering any payment breaks the equilibrium", broken == checked, broken, checked)

        e1 = MultiAgentInstance(costs=(Fraction(3, 50), Fraction(1, 10)), f=AdditiveFn([Fraction(3, 10), Fraction(1, 2)]))
        full = ItemSet.full(2)
        payments = multiagent.equilibrium_payments(e1, full)
        rows.add("additive example payments", payments == (Fraction(1, 5), Fraction(1, 5)), payments)
        rows.add("underpaying agent 1 is not an equilibrium",
                 not multiagent.verify_equilibrium(e1, (Fraction(1, 10), Fraction(1, 5)), full))
        rows.add("zero payments sustain the empty set",
                 multiagent.verify_equilibrium(e1, (Fraction(0), Fraction(0)), ItemSet.empty(2)))

    def _multiagent_exact(self, rows: _Rows, rng: np.random.Generator) -> None:
        dominant = stable = 0
        count = self.sizes.exact_instances
        for _ in range(count):
            inst = _random_multiagent(rng, int(rng.integers(1, 9)))
            solution = multiagent.solve_exact(inst)
            best = max(multiagent.objective_g(inst, S) for S in _all_sets(inst.n))
            dominant += solution.objective == best
            stable += multiagent.verify_equilibrium(inst, solution.payments, solution.S)
        rows.add("exact optimum dominates every set", dominant == count, dominant, count)
        rows.add("optimal contract is an equilibrium", stable == count, stable, count)

        e1 = MultiAgentInstance(costs=(Fraction(3, 50), Fraction(1, 10)), f=AdditiveFn([Fraction(3, 10), Fraction(1, 2)]))
        solution = multiagent.solve_exact(e1)
        rows.add("additive example optimum", solution.S.bits == 0b11 and solution.objective == Fraction(12, 25),
                 solution.objective, Fraction(12, 25), f"S={solution.S}")

    def _pseudo_symmetric_ptas(self, rows: _Rows, rng: np.random.Generator) -> None:
        count = self.sizes.ptas_instances
        for epsilon in (Fraction(1, 4), Fraction(1, 2)):
            within = exact_when_symmetric = symmetric = 0
            worst = None
            for index in range(count):
                n = int(rng.integers(2, self.sizes.ptas_max_n + 1))
                is_symmetric = index % 4 == 0
                inst = pseudosymmetric_instance(n, seed=int(rng.integers(2 ** 32)), symmetric=is_symmetric)
                optimum = multiagent.solve_exact(inst).objective
                approx = multiagent.solve_ptas_pseudosymmetric(inst, epsilon).objective
                within += approx >= (1 - epsilon) * optimum
                ratio = approx / optimum if optimum > 0 else Fraction(1)
                worst = ratio if worst is None else min(worst, ratio)
                if is_symmetric:
                    symmetric += 1
                    exact_when_symmetric += approx == optimum
            rows.add(f"PTAS within 1 - {epsilon} of the optimum", within == count, worst, 1 - epsilon,
                     "observed is the worst ratio")
            rows.add(f"PTAS is exact without a bonus (epsilon {epsilon})",
                     exact_when_symmetric == symmetric, exact_when_symmetric, symmetric)

        inst = pseudosymmetric_instance(6, seed=int(rng.integers(2 ** 32)))
        size = len(multiagent.ptas_candidates(inst, 1))
        rows.add("candidate family at n=6, epsilon=1", size == 26, size, 26)

    def _planted_cover_multiagent(self, rows: _Rows, rng: np.random.Generator) -> None:
        for k, copies in ((2, 5), (3, 3)):
            cover = planted_cover_coverage(k, copies)
            inst = multiagent_submodular_gadget(k, cover.function)
            solution = multiagent.solve_exact(inst)
            rows.add(f"optimum is 1/2 at k={k}", solution.objective == Fraction(1, 2), solution.objective,
                     Fraction(1, 2), f"{inst.n} agents, S={solution.S}")
            violations = 0
            for T in _all_sets(inst.n):
                t = len(T)
                if not multiagent.objective_g(inst, T) <= (1 - Fraction(t, 2 * k)) * Fraction(t, k):
                    violations += 1
            rows.add(f"g(T) <= (1 - |T|/2k) |T|/k at k={k}", violations == 0, violations, 0)
            large = [T for T in _all_sets(inst.n) if len(T) >= 2 * k]
            rows.add(f"sets of at least 2k agents have g <= 0 at k={k}",
                     all(multiagent.objective_g(inst, T) <= 0 for T in large), len(large))

    def _analytic_inequalities(self, rows: _Rows, rng: np.random.Generator) -> None:
        x = np.arange(0.0, 2.0 + self.sizes.inequality_step / 2, self.sizes.inequality_step)
        product = (1 - x / 2) * (1 - np.exp(-x) + 0.01)
        peak = int(np.argmax(product))
        rows.add("(1 - x/2)(1 - e^-x + 0.01) < 0.35 on [0, 2]", bool(product[peak] < 0.35),
                 float(product[peak]), 0.35, f"max at x={x[peak]:.4f}")
        slack = np.exp(-x) - (1 - x + x ** 2 / 4)
        low = int(np.argmin(slack))
        rows.add("e^-x >= 1 - x + x^2/4 on [0, 2]", bool(slack[low] >= -settings.tolerance),
                 float(slack[low]), 0.0, f"min margin at x={x[low]:.4f}")

    # hidden set

    def _hidden_set_identity(self, rows: _Rows, rng: np.random.Generator) -> None:
        for n in (27, 64):
            m = cube_root(n)
            inst = hidden_set_instance(n, seed=int(rng.integers(2 ** 32)))
            value = multiagent.objective_g(inst, inst.f.good)
            rows.add(f"g(G) = m/(2n) at n={n}", value == Fraction(m, 2 * n), value, Fraction(m, 2 * n))

        inst = hidden_set_instance(8, good=ItemSet.from_indices([0, 1], 8))
        value = multiagent.objective_g(inst, inst.f.good)
        expected = (2 - math.sqrt(2)) / 16
        rows.add("g(G) at n=8 follows the removal marginal", math.isclose(value, expected, abs_tol=settings.tolerance),
                 value, expected, "sqrt(m) is irrational so f(G - i) = sqrt(2)/8")
        f3 = inst.f.value(ItemSet.from_indices([0, 1, 2], 8))
        rows.add("f_G({1,2,3}) at n=8", math.isclose(f3, 3 / (8 * math.sqrt(2)), abs_tol=settings.tolerance),
                 f3, 3 / (8 * math.sqrt(2)))

        f = inst.f
        xos = f.as_xos()
        mismatches = sum(not math.isclose(float(f.value_bits(b)), float(xos.value_bits(b)), abs_tol=settings.tolerance)
                         for b in range(1, 1 << 8))
        rows.add("f_G equals its XOS clauses at n=8", mismatches == 0, mismatches, 0)
        rows.add("f_G is monotone at n=8", check_classes(f).monotone)

    def _hidden_set_unsuccessful(self, rows: _Rows, rng: np.random.Generator) -> None:
        n = 64
        m = cube_root(n)
        inst = hidden_set_instance(n, seed=int(rng.integers(2 ** 32)))
        f: HiddenSetFn = inst.f
        table = hidden_set_objective_by_counts(inst)
        g_good = table[(m, m)]
        bound = 4 * g_good / f.sqrt_m
        rows.add("bound 4 g(G)/sqrt(m) at n=64", bound == Fraction(1, 16), bound, Fraction(1, 16))

        def unsuccessful(s: int, t: int) -> bool:
            return not (s * s <= n and t * t > m)

        small = [(s, t) for (s, t) in table if s <= 2]
        rows.add("sets of size <= 2 are unsuccessful and below the bound",
                 all(unsuccessful(s, t) and approx_le(table[(s, t)], bound) for s, t in small),
                 max(table[p] for p in small), bound)
        worst = max(table[p] for p in table if unsuccessful(*p))
        rows.add("every unsuccessful count pair is below the bound", approx_le(worst, bound), worst, bound)

        good = np.zeros(n, dtype=bool)
        good[list(f.good)] = True
        root = math.isqrt(n)
        sampled = below = within = 0
        direct: List[np.ndarray] = []
        remaining = self.sizes.random_sets
        while remaining:
            batch = min(remaining, 10_000)
            remaining -= batch
            # half the draws stay within the size limit |S| <= sqrt(n)
            sizes = np.where(rng.random(batch) < 0.5, rng.integers(1, root + 1, size=batch),
                             rng.integers(1, n + 1, size=batch))
            ranks = np.argsort(rng.random((batch, n)), axis=1).argsort(axis=1)
            members = ranks < sizes[:, None]
            hits = (members & good[None, :]).sum(axis=1)
            for row, (s, t) in enumerate(zip(sizes.tolist(), hits.tolist())):
                if unsuccessful(s, t):
                    sampled += 1
                    below += approx_le(table[(s, t)], bound)
                    within += s <= root
                    if len(direct) < self.sizes.direct_checks:
                        direct.append(members[row])
        rows.add("sampled unsuccessful sets are below the bound", below == sampled, below, sampled)
        rows.add("sampled unsuccessful sets include sets within the size limit", within > 0, within, sampled,
                 f"|S| <= {root}")

        agree = 0
        for members in direct:
            S = ItemSet.from_indices(np.flatnonzero(members).tolist(), n)
            agree += multiagent.objective_g(inst, S) == table[(len(S), len(S.intersection(f.good)))]
        rows.add("direct g agrees with the count table", agree == len(direct), agree, len(direct))

    def _hidden_set_opacity(self, rows: _Rows, rng: np.random.Generator) -> None:
        for n in (8, 27, 64):
            m = cube_root(n)
            f = HiddenSetFn(n, draw_hidden_set(n, rng))
            other = HiddenSetFn(n, draw_hidden_set(n, rng))
            checked = same = 0
            for _ in range(self.sizes.direct_checks or 1):
                size = int(rng.integers(1, math.isqrt(n) + 1))
                S = ItemSet.from_indices(rng.choice(n, size=size, replace=False).tolist(), n)
                t = len(S.intersection(f.good))
                if t * t > m:
                    continue
                checked += 1
                expected = max(f.sqrt_m, size / f.sqrt_m) / n
                value = f.value(S)
                opaque = math.isclose(float(value), float(expected), abs_tol=settings.tolerance)
                if len(S.intersection(other.good)) ** 2 <= m:
                    opaque = opaque and math.isclose(float(value), float(other.value(S)), abs_tol=settings.tolerance)
                same += opaque
            rows.add(f"uninformative queries ignore G at n={n}", same == checked, same, checked)
            rows.add(f"full set query is unsuccessful at n={n}",
                     not is_successful_query(n, f.good, ItemSet.full(n)))

    def _successful_query_rate(self, rows: _Rows, rng: np.random.Generator) -> None:
        service = EstimationService()
        seed = int(rng.integers(2 ** 32))
        report = service.estimate_success(512, trials=self.sizes.mc_trials, seed=seed)
        rows.add("success rate below e^(-sqrt(m)/4) at n=512", bool(report.within_bound), report.rate, report.bound,
                 f"stderr={report.stderr:.5f}, |S|={report.set_size}")
        tolerance = 5 * report.stderr + 1e-3
        rows.add("success rate matches the hypergeometric tail", abs(report.rate - report.exact_tail) <= tolerance,
                 report.rate, report.exact_tail, f"allowed deviation {tolerance:.5f}")
        empty = service.estimate_success(512, set_size=0, trials=1000, seed=seed)
        full = service.estimate_success(512, set_size=512, trials=1000, seed=seed)
        rows.add("empty and full queries never succeed", empty.successes == 0 and full.successes == 0,
                 empty.successes + full.successes, 0)

    # clique reduction

    def _clique_best_response(self, rows: _Rows, rng: np.random.Generator) -> None:
        graphs = graph_battery(self.sizes.graphs, self.sizes.graph_max_vertices, int(rng.integers(2 ** 32)))
        checked = matched = 0
        failures: List[str] = []
        for index, graph in enumerate(graphs):
            omega, _ = max_clique_bruteforce(graph)
            for delta in (1, 2, 4):
                for beta in (Fraction(1, 4), Fraction(1, 2)):
                    inst, gadget = clique_xos_instance(graph, delta, beta)
                    M, eps = gadget.M, gadget.epsilon
                    low, high = M / (M + 1 + eps), M / (M + 1)
                    top = max(omega, delta)
                    ranges = ((Fraction(0), low, "empty"), (low, high, "delta-clique"), (high, Fraction(1), "maximum clique"))
                    for lo, hi, case in ranges:
                        draws = [Fraction(int(j), 1000) for j in rng.integers(0, 1000, size=self.sizes.alpha_samples)]
                        if case != "empty":
                            draws[0] = Fraction(0)
                        for share in draws:
                            alpha = lo + (hi - lo) * share
                            S = multiaction.agent_best_response(inst, alpha)
                            utility = multiaction.principal_utility(inst, alpha)
                            if case == "empty":
                                ok = not len(S) and utility == 0
                            elif case == "delta-clique":
                                ok = (len(S) == delta and gadget.is_clique(S)
                                      and utility == (M + 1 + eps) * delta * (1 - alpha))
                            else:
                                ok = (len(S) == top and gadget.is_clique(S)
                                      and utility == ((M + 1) * top + delta * eps) * (1 - alpha))
                            checked += 1
                            matched += ok
                            if not ok and len(failures) < 5:
                                failures.append(f"graph {index}, delta={delta}, beta={beta}, alpha={alpha}: S={S}")
        rows.add("best response follows the three alpha ranges", matched == checked, matched, checked,
                 "; ".join(failures))

        triangle = nx.complete_graph(3)
        inst, gadget = clique_xos_instance(triangle, 1, Fraction(1, 2))
        solution = multiaction.solve_exact(inst)
        rows.add("triangle gadget optimum", solution.alpha == Fraction(7, 11) and solution.principal_utility == 4,
                 solution.principal_utility, 4, f"alpha={solution.alpha}")
        points = multiaction.breakpoints(inst)
        rows.add("triangle gadget breakpoints include both thresholds",
                 Fraction(7, 11) in points and Fraction(7, 8) in points, len(points))
        rows.add("triangle gadget u_P(7/8) = 27/8",
                 multiaction.principal_utility(inst, Fraction(7, 8)) == Fraction(27, 8))

    def _clique_xos_witness(self, rows: _Rows, rng: np.random.Generator) -> None:
        graphs = graph_battery(self.sizes.xos_graphs, 6, int(rng.integers(2 ** 32)))
        for index, graph in enumerate(graphs):
            delta = int(rng.integers(1, 9 - graph.number_of_nodes())) if graph.number_of_nodes() < 8 else 1
            beta = Fraction(1, int(rng.integers(2, 5)))
            _, gadget = clique_xos_instance(graph, delta, beta)
            n = gadget.n
            sets = np.arange(1 << n, dtype=np.int64)
            weights = [gadget.clause_weight(ItemSet(int(T), n)) for T in sets[1:]]
            scale = math.lcm(*(w.denominator for w in weights), gadget.epsilon.denominator)
            weight_num = np.array([int(w * scale) for w in weights], dtype=np.int64)
            table = gadget.table()
            values = table.data * (scale // table.denominator)
            overlap = popcount_array((sets[:, None] & sets[None, 1:]).ravel()).reshape(len(sets), -1)
            clause = overlap * weight_num[None, :]
            dominated = bool((clause <= values[:, None]).all())
            attained = bool((clause[sets[1:], sets[1:] - 1] == values[1:]).all())
            sample = ItemSet(int(rng.integers(1, 1 << n)), n)
            direct = xos_clause_value(gadget, sample, sample) == gadget.value(sample)
            rows.add(f"clauses never exceed f (graph {index}, |V'|={n})", dominated)
            rows.add(f"clause T = S attains f (graph {index}, |V'|={n})", attained and direct)

        triangle = nx.complete_graph(3)
        _, gadget = clique_xos_instance(triangle, 1, Fraction(1, 2))
        edge, single = ItemSet.from_indices([0, 1], 4), ItemSet.from_indices([0], 4)
        value = xos_clause_value(gadget, edge, single)
        rows.add("triangle edge clause at one endpoint", value == Fraction(19, 2), value, Fraction(19, 2))
        added = gadget.value(gadget.added_clique)
        rows.add("triangle gadget constants", (gadget.epsilon, gadget.M, added, gadget.value(ItemSet.full(4)))
                 == (3, 7, 11, 31), detail=f"epsilon={gadget.epsilon}, M={gadget.M}")

    def _clique_reduction(self, rows: _Rows, rng: np.random.Generator) -> None:
        graphs = graph_battery(self.sizes.graphs, self.sizes.graph_max_vertices, int(rng.integers(2 ** 32)))
        for beta in (Fraction(1, 4), Fraction(1, 2)):
            oracles = (exact_oracle(), degraded_oracle(beta))
            approx_ok = promise_ok = honored = runs = promised = 0
            for graph in graphs:
                omega, _ = max_clique_bruteforce(graph)
                for oracle in oracles:
                    service = CliqueService(oracle, beta)
                    estimate = service.approx_clique(graph)
                    runs += 1
                    approx_ok += beta ** 2 / 4 * omega <= estimate <= omega
                    for delta in (1, 2, 4):
                        result = service.run(graph, delta)
                        if omega <= delta:
                            promised += 1
                            promise_ok += result.verdict == CliqueVerdict.SMALL
                        elif omega >= 2 * delta / beta ** 2:
                            promised += 1
                            promise_ok += result.verdict == CliqueVerdict.LARGE
                        if oracle is oracles[1]:
                            inst, _ = clique_xos_instance(graph, delta, beta)
                            optimum = multiaction.solve_exact(inst).principal_utility
                            honored += multiaction.principal_utility(inst, result.alpha) >= beta * optimum
            rows.add(f"estimate within [beta^2/4 omega, omega] (beta {beta})", approx_ok == runs, approx_ok, runs)
            rows.add(f"verdicts respect both promises (beta {beta})", promise_ok == promised, promise_ok, promised)
            rows.add(f"degraded oracle honors beta (beta {beta})", honored == 3 * len(graphs), honored, 3 * len(graphs))

        half = Fraction(1, 2)
        exact = CliqueService(exact_oracle(), half)
        empty = nx.empty_graph(5)
        rows.add("empty graph on 5 vertices is SMALL at delta=2", exact.distinguish(empty, 2) == CliqueVerdict.SMALL)
        rows.add("empty graph on 5 vertices estimates 1", exact.approx_clique(empty) == 1)
        rows.add("K8 is LARGE at delta=1", exact.distinguish(nx.complete_graph(8), 1) == CliqueVerdict.LARGE)
        rows.add("single vertex estimates 1", exact.approx_clique(nx.empty_graph(1)) == 1)

        M = Fraction(7)
        threshold = M / (M + 1)
        nudge = Fraction(1, 10 ** 9)
        flips = (classify(threshold - nudge, M), classify(threshold, M), classify(threshold + nudge, M))
        rows.add("verdict flips exactly at M/(M+1)",
                 flips == (CliqueVerdict.SMALL, CliqueVerdict.LARGE, CliqueVerdict.LARGE),
                 detail=", ".join(v.value for v in flips))

    # multi-action

    def _anchored_cover_multiaction(self, rows: _Rows, rng: np.random.Generator) -> None:
        beta = Fraction(1, 20)
        for k in (2, 3):
            cover = planted_cover_coverage(k, 1)
            inst = multiaction_submodular_gadget(k, cover.function, beta)
            anchor = inst.n - 1
            fprime = cover.function

            mismatches = 0
            for S in _all_sets(inst.n):
                inner = S.bits & ~(1 << anchor)
                direct = (fprime.value_bits(inner) + (1 if anchor in S else 0)) / 2
                mismatches += inst.f.value(S) != direct
            rows.add(f"anchored coverage matches the direct formula (k={k})", mismatches == 0, mismatches, 0)

            solution = multiaction.solve_exact(inst)
            rows.add(f"optimal alpha below 1 - beta^3 (k={k})", solution.alpha < 1 - beta ** 3,
                     solution.alpha, 1 - beta ** 3)
            response = multiaction.agent_best_response(inst, 1 - beta ** 2)
            value = inst.f.value(response)
            rows.add(f"best response at 1 - beta^2 reaches 1/2 (k={k})", value >= Fraction(1, 2), value, Fraction(1, 2))
            lower = [(1 - beta ** 2) * Fraction(int(j), 1000) for j in rng.integers(0, 1000, size=5)]
            rows.add(f"no action below 1 - beta^2 (k={k})",
                     all(not len(multiaction.agent_best_response(inst, a)) for a in lower))

        inst = multiaction_submodular_gadget(2, planted_cover_coverage(2, 1).function, beta)
        rows.add("gadget costs at k=2, beta=1/20",
                 inst.costs[-1] == Fraction(7999, 16000) and inst.costs[0] == Fraction(399, 1600),
                 detail=f"anchor={inst.costs[-1]}, action={inst.costs[0]}")

    def _multiaction_grid_oracle(self, rows: _Rows, rng: np.random.Generator) -> None:
        points = self.sizes.grid_points
        grid = np.arange(points + 1, dtype=np.float64) / points
        count = self.sizes.grid_instances
        dominates = agrees = coincident = 0
        for _ in range(count):
            inst = _random_multiaction(rng, int(rng.integers(1, 9)))
            solution = multiaction.solve_exact(inst)
            scanned = multiaction.principal_utility_grid(inst, grid)
            best = float(scanned.max())
            dominates += float(solution.principal_utility) >= best - settings.tolerance
            for alpha in multiaction.breakpoints(inst):
                position = alpha * points
                if position.denominator != 1:
                    continue
                coincident += 1
                exact_value = multiaction.principal_utility(inst, alpha)
                agrees += math.isclose(float(exact_value), float(scanned[int(position)]), abs_tol=settings.tolerance)
        rows.add("breakpoint optimum dominates the alpha grid", dominates == count, dominates, count)
        rows.add("grid matches exact u_P at coinciding breakpoints", agrees == coincident, agrees, coincident)

        e2 = MultiActionInstance(costs=(Fraction(1, 10), Fraction(1, 10)), f=AdditiveFn([Fraction(2, 5), Fraction(2, 5)]))
        scanned = multiaction.principal_utility_grid(e2, grid)
        rows.add("additive example grid maximum", math.isclose(float(scanned.max()), 0.6, abs_tol=settings.tolerance),
                 float(scanned.max()), Fraction(3, 5))

    def _multiaction_envelope(self, rows: _Rows, rng: np.random.Generator) -> None:
        count = self.sizes.envelope_instances
        shaped = best_ok = solver_ok = 0
        for _ in range(count):
            inst = _random_multiaction(rng, int(rng.integers(1, 8)))
            points = multiaction.breakpoints(inst)
            utilities = []
            for alpha in points:
                S = multiaction.agent_best_response(inst, alpha)
                utilities.append(multiaction.agent_utility(inst, S, alpha))
            slopes = [(u2 - u1) / (a2 - a1) for (a1, u1), (a2, u2)
                      in zip(zip(points, utilities), zip(points[1:], utilities[1:]))]
            shaped += all(u2 >= u1 for u1, u2 in zip(utilities, utilities[1:])) and all(
                s2 >= s1 for s1, s2 in zip(slopes, slopes[1:]))

            alpha = Fraction(int(rng.integers(0, 101)), 100)
            S = multiaction.agent_best_response(inst, alpha)
            mine = multiaction.agent_utility(inst, S, alpha)
            best_ok += all(mine >= multiaction.agent_utility(inst, T, alpha) for T in _all_sets(inst.n))

            solution = multiaction.solve_exact(inst)
            scanned = max(points, key=lambda a: (multiaction.principal_utility(inst, a), -a))
            solver_ok += (solution.alpha == scanned
                          and solution.principal_utility == multiaction.principal_utility(inst, scanned))
        rows.add("agent utility is non-decreasing and convex", shaped == count, shaped, count)
        rows.add("best response maximizes agent utility", best_ok == count, best_ok, count)
        rows.add("envelope optimum matches the breakpoint scan", solver_ok == count, solver_ok, count)

        e2 = MultiActionInstance(costs=(Fraction(1, 10), Fraction(1, 10)), f=AdditiveFn([Fraction(2, 5), Fraction(2, 5)]))
        points = multiaction.breakpoints(e2)
        solution = multiaction.solve_exact(e2)
        rows.add("additive example breakpoints", points == [0, Fraction(1, 4), 1], len(points), 3)
        rows.add("additive example optimum",
                 (solution.alpha, solution.best_response.bits, solution.principal_utility) == (Fraction(1, 4), 0b11, Fraction(3, 5)),
                 solution.principal_utility, Fraction(3, 5), f"alpha={solution.alpha}")

    # k-prover coverage

    def _prover_coverage(self, rows: _Rows, rng: np.random.Generator) -> None:
        formula, assignment = Formula3CNF5.random_planted(3, seed=int(rng.integers(2 ** 32)))
        params = KProverParams.with_greedy_codebook(2, 2)
        cov = kprover_coverage(formula, params)
        f = cov.function
        sizes = (cov.question_count, cov.k_prime, cov.randomness_count, cov.L, f.universe_size)
        rows.add("toy construction sizes", sizes == (15, 30, 225, 4, 3600), detail=f"|Q|, k', |R|, L, |U| = {sizes}")
        rows.add("codebook for k=2, ell=2", params.codewords == ("10", "01"), detail=str(params.codewords))

        target = singleton_value(cov)
        off = sum(f.value_bits(1 << i) != target for i in range(f.n))
        rows.add("every item is worth 1/k'", off == 0, off, 0, f"{f.n} items")

        planted = cov.planted_set(assignment)
        value = f.value(planted)
        rows.add("planted answers cover the universe", len(planted) == cov.k_prime and value == 1, value, 1,
                 f"|S|={len(planted)}")

        report = verify_block_claims(cov, self.sizes.block_samples, seed=int(rng.integers(2 ** 32)))
        rows.add("block unions match their closed forms", report.passed, len(report.violations), 0,
                 "; ".join(report.violations[:3]))
        expected = {1: 8, 2: 12, 4: 15}
        counted = {}
        for width in expected:
            union = 0
            for j in range(width):
                union |= cov.block(0, j, j % params.k)
            counted[width] = union.bit_count()
        rows.add("family unions of widths 1, 2 and 4", counted == expected, detail=str(counted))

    def _coverage_gap(self, rows: _Rows, rng: np.random.Generator) -> None:
        for k, copies in ((2, 3), (3, 2)):
            cover = planted_cover_coverage(k, copies)
            report = coverage_gap_report(cover.function, k, 2, 0.01)
            for row in report:
                rows.add(f"k={k}, size {row.size} recorded", True, row.best_value, row.bound,
                         "within" if row.holds else "exceeds (planted cover)")
            best = {row.size: row.best_value for row in report}
            rows.add(f"planted cover reaches 1 at size k={k}", best.get(k) == 1, best.get(k), 1)
            values = [best[s] for s in sorted(best)]
            rows.add(f"best coverage is monotone in size (k={k})",
                     all(b >= a for a, b in zip(values, values[1:])))
