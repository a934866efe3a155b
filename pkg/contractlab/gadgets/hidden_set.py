"""
Hidden-set XOS instances.

f_G(S) = max(|S & G|, sqrt(m), |S| / sqrt(m)) / n for non-empty S, where G is a hidden
set of m = n^(1/3) good agents. Value queries on small sets with few good agents
return the same value for every G, so finding a good contract means guessing G.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..core.exceptions import GadgetConstructionError
from ..core.numeric import Number
from ..models.itemset import ItemSet
from ..models.multiagent import MultiAgentInstance, objective_g
from ..models.setfn import SetFunction, XosFn

logger = logging.getLogger(__name__)


def cube_root(n: int) -> int:
    """Integer m with m^3 = n; GadgetConstructionError when n is not a perfect cube."""
    if n < 1:
        raise GadgetConstructionError(f"n must be a positive cube, got {n}")
    m = round(n ** (1 / 3))
    for candidate in (m - 1, m, m + 1):
        if candidate > 0 and candidate ** 3 == n:
            return candidate
    raise GadgetConstructionError(f"n = {n} is not a perfect cube")


def _sqrt(m: int) -> Number:
    root = math.isqrt(m)
    return Fraction(root) if root * root == m else math.sqrt(m)


class HiddenSetFn(SetFunction):
    """
    f_G over n = m^3 agents.

    Which of the three terms dominates is decided with integer comparisons
    (t^2 vs m, t^2 m vs s^2, m vs s), so a value is a Fraction whenever its dominant
    term is rational and a float only when it involves an irrational sqrt(m).
    """

    kind = "hidden-set"

    def __init__(self, n: int, good: ItemSet, normalize_by: Number = 1):
        m = cube_root(n)
        if good.n != n:
            raise GadgetConstructionError(f"Hidden set over {good.n} agents, expected {n}")
        if len(good) != m:
            raise GadgetConstructionError(f"Hidden set must have m = {m} agents, got {len(good)}")
        super().__init__(n, normalize_by)
        self.m = m
        self.good = good
        self.sqrt_m = _sqrt(m)

    def _data_exact(self) -> bool:
        return isinstance(self.sqrt_m, Fraction)

    def value_by_counts(self, size: int, good_count: int) -> Number:
        """f_G for any set with `size` agents, `good_count` of them in G."""
        s, t, m, n = size, good_count, self.m, self.n
        if s == 0:
            return Fraction(0)
        if t * t >= m and t * t * m >= s * s:
            return Fraction(t, n)
        if m >= s:
            return self.sqrt_m / n
        if isinstance(self.sqrt_m, Fraction):
            return Fraction(s, n) / self.sqrt_m
        return s / (self.sqrt_m * n)

    def _evaluate(self, bits: int) -> Number:
        return self.value_by_counts(bits.bit_count(), (bits & self.good.bits).bit_count())

    def as_xos(self) -> XosFn:
        """
        The same function as an explicit maximum of additive clauses: the G indicator
        over n, the uniform clause 1/(sqrt(m) n), and one unit clause of weight
        sqrt(m)/n per agent (their maximum is the constant term on non-empty sets).
        """
        n = self.n
        indicator = [Fraction(1, n) if i in self.good else Fraction(0) for i in range(n)]
        uniform = [1 / (self.sqrt_m * n)] * n
        units = [[self.sqrt_m / n if i == j else 0 for i in range(n)] for j in range(n)]
        return XosFn([indicator, uniform] + units, normalize_by=self.normalize_by)


def draw_hidden_set(n: int, rng: np.random.Generator) -> ItemSet:
    """Uniformly random G of size n^(1/3)."""
    m = cube_root(n)
    chosen = rng.choice(n, size=m, replace=False)
    return ItemSet.from_indices((int(i) for i in chosen), n)


def hidden_set_instance(n: int, good: Optional[ItemSet] = None, seed: Optional[int] = None) -> MultiAgentInstance:
    """
    Multi-agent instance over f_G with uniform costs 1/(2mn).

    Args:
        n: agent count, a perfect cube
        good: explicit hidden set; drawn uniformly from `seed` when omitted
        seed: generator seed for the draw

    Returns:
        MultiAgentInstance: the hidden-set instance

    Raises:
        GadgetConstructionError: if n is not a cube or |G| != m
    """
    m = cube_root(n)
    if good is None:
        good = draw_hidden_set(n, np.random.default_rng(seed))
    f = HiddenSetFn(n, good)
    logger.info(f"Hidden-set instance: n={n}, m={m}, G={good}")
    return MultiAgentInstance(costs=tuple(Fraction(1, 2 * m * n) for _ in range(n)), f=f)


def is_successful_query(n: int, good: ItemSet, S: ItemSet) -> bool:
    """|S| <= m^1.5 and |S & G| > sqrt(m), compared as s^2 <= n and t^2 > m."""
    m = cube_root(n)
    s = len(S)
    t = len(S.intersection(good))
    return s * s <= n and t * t > m


def representative_set(f: HiddenSetFn, size: int, good_count: int) -> ItemSet:
    """The set made of the first `good_count` agents of G and the first remaining non-G agents."""
    inside = list(f.good)[:good_count]
    outside = [i for i in range(f.n) if i not in f.good][:size - good_count]
    return ItemSet.from_indices(inside + outside, f.n)


def count_pairs(n: int) -> Sequence[Tuple[int, int]]:
    """Every realizable (|S|, |S & G|)."""
    m = cube_root(n)
    return [(s, t) for s in range(n + 1) for t in range(min(s, m) + 1) if s - t <= n - m]


def hidden_set_objective_by_counts(inst: MultiAgentInstance) -> Dict[Tuple[int, int], Number]:
    """
    g for every realizable (|S|, |S & G|).

    f_G and the uniform costs are invariant under permutations that fix G, so g
    depends on S only through these two counts; each pair is evaluated on one
    representative set.
    """
    f = inst.f
    if not isinstance(f, HiddenSetFn):
        raise GadgetConstructionError("Expected an instance built over a hidden-set function")
    table = {}
    for s, t in count_pairs(f.n):
        table[(s, t)] = objective_g(inst, representative_set(f, s, t))
    logger.debug(f"Tabulated g over {len(table)} (size, good) pairs for n={f.n}")
    return table
