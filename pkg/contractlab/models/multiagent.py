"""
Multi-agent contracts: a principal pays agent i a share alpha_i of the reward to
make a set S of agents exert effort, and earns g(S) = (1 - sum of alpha_i) f(S).
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import settings
from ..core.exceptions import (
    CapExceededError,
    DimensionError,
    GadgetConstructionError,
    InvalidInstanceError,
    PreconditionError,
)
from ..core.numeric import (
    Number,
    all_exact,
    approx_le,
    divide,
    exact_or_float,
    int_array,
    is_exact,
    lcm_denominator,
    parse_number,
    to_fraction,
)
from ..utils.bitmask import ensure_cap, iter_bits, masks_up_to_size, popcounts
from ..utils.parallel import map_ranges
from .itemset import ItemSet
from .setfn import SetFunction, ValueTable, check_classes

logger = logging.getLogger(__name__)

# Float-screen margin before exact re-ranking of solve_exact candidates.
_SCREEN_MARGIN = 1e-7


@dataclass(frozen=True)
class MultiAgentInstance:
    """Agents 0..n-1 with effort costs and a success probability function f."""

    costs: Tuple[Number, ...]
    f: SetFunction

    def __post_init__(self):
        costs = tuple(exact_or_float(c) for c in self.costs)
        object.__setattr__(self, "costs", costs)
        if len(costs) != self.f.n:
            raise DimensionError(f"{len(costs)} costs for a function over {self.f.n} agents")
        if any(c < 0 for c in costs):
            raise InvalidInstanceError("Agent costs must be non-negative")

    @property
    def n(self) -> int:
        return self.f.n

    @property
    def exact(self) -> bool:
        return self.f.exact and all_exact(self.costs)


@dataclass(frozen=True)
class MultiAgentSolution:
    """A contract (alpha, S) with its objective g(S)."""

    S: ItemSet
    payments: Tuple[Number, ...]
    objective: Number


def _zero_like(value: Number) -> Number:
    return Fraction(0) if is_exact(value) else 0.0


def _payments(costs: Sequence[Number], bits: int, n: int, value_of: Callable[[int], Number]) -> Tuple[Number, ...]:
    f_s = value_of(bits)
    payments: List[Number] = []
    for i in range(n):
        c = costs[i]
        if not bits >> i & 1 or c == 0:
            payments.append(_zero_like(c))
            continue
        gain = f_s - value_of(bits & ~(1 << i))
        payments.append(divide(c, gain) if gain > 0 else math.inf)
    return tuple(payments)


def _objective(costs: Sequence[Number], bits: int, value_of: Callable[[int], Number]) -> Number:
    f_s = value_of(bits)
    if f_s == 0:
        return f_s
    total: Number = Fraction(0)
    for i in iter_bits(bits):
        c = costs[i]
        if c == 0:
            continue
        gain = f_s - value_of(bits & ~(1 << i))
        if gain <= 0:
            return -math.inf
        total = total + divide(c, gain)
    return (1 - total) * f_s


def equilibrium_payments(inst: MultiAgentInstance, S: ItemSet) -> Tuple[Number, ...]:
    """
    Cheapest payments that make S an equilibrium.

    alpha_i = c_i / f(i | S - i) for i in S and 0 elsewhere; a zero cost pays 0 and a
    positive cost over a non-positive marginal pays +inf.

    Args:
        inst: multi-agent instance
        S: agents asked to exert effort

    Returns:
        Tuple of n payments (math.inf marks an impossible incentive)
    """
    inst.f._check_set(S)
    return _payments(inst.costs, S.bits, inst.n, inst.f.value_bits)


def objective_g(inst: MultiAgentInstance, S: ItemSet) -> Number:
    """Principal's utility from optimally incentivizing S; -inf when some agent cannot be paid enough."""
    inst.f._check_set(S)
    return _objective(inst.costs, S.bits, inst.f.value_bits)


def verify_equilibrium(inst: MultiAgentInstance, payments: Sequence[Number], S: ItemSet) -> bool:
    """
    Check that no agent wants to deviate from S under the given payments.

    Agents in S must not prefer shirking and agents outside S must not prefer
    working. Comparisons are exact for rationals and within tolerance otherwise.
    """
    if len(payments) != inst.n:
        raise DimensionError(f"Expected {inst.n} payments, got {len(payments)}")
    inst.f._check_set(S)
    if any(isinstance(a, float) and not math.isfinite(a) for a in payments):
        return False
    f = inst.f
    f_s = f.value(S)
    for i in range(inst.n):
        a, c = payments[i], inst.costs[i]
        if i in S:
            working, shirking = a * f_s - c, a * f.value(S.without_item(i))
            if not approx_le(shirking, working):
                return False
        else:
            staying, joining = a * f_s, a * f.value(S.with_item(i)) - c
            if not approx_le(joining, staying):
                return False
    return True


def _float_objectives(table: ValueTable, costs: Sequence[Number], start: int, stop: int) -> np.ndarray:
    values = table.as_float()
    n = len(costs)
    masks = np.arange(start, stop, dtype=np.int64)
    f_s = values[start:stop]
    paid = np.zeros(stop - start, dtype=np.float64)
    blocked = np.zeros(stop - start, dtype=bool)
    for i in range(n):
        c = float(costs[i])
        if c == 0:
            continue
        bit = 1 << i
        inside = (masks & bit) != 0
        gain = f_s - values[masks & ~bit]
        payable = inside & (gain > 0)
        blocked |= inside & ~(gain > 0)
        paid[payable] += c / gain[payable]
    g = (1.0 - paid) * f_s
    g[blocked] = -np.inf
    g[f_s == 0] = 0.0
    return g


def _best_of(inst: MultiAgentInstance, masks: Sequence[int], value_of: Callable[[int], Number]) -> Tuple[int, Number]:
    best_bits, best_value = None, None
    for bits in sorted(masks):
        value = _objective(inst.costs, bits, value_of)
        if best_value is None or value > best_value:
            best_bits, best_value = bits, value
    return best_bits, best_value


def _solution(inst: MultiAgentInstance, bits: int) -> MultiAgentSolution:
    S = ItemSet(bits, inst.n)
    return MultiAgentSolution(S=S, payments=equilibrium_payments(inst, S), objective=objective_g(inst, S))


def solve_exact(inst: MultiAgentInstance, size_cap: Optional[int] = None) -> MultiAgentSolution:
    """
    Exhaustive maximization of g over all sets (or all sets of size <= size_cap).

    The full scan screens every bitmask with vectorized float objectives across
    worker threads, then re-ranks the near-optimal candidates with exact
    arithmetic when the instance is rational. Ties go to the smaller bitmask.

    Args:
        inst: multi-agent instance
        size_cap: optional bound on |S|

    Returns:
        MultiAgentSolution: optimal set, its equilibrium payments and g

    Raises:
        CapExceededError: if the enumeration is above the configured cap
    """
    n = inst.n
    if size_cap is not None:
        candidates = sum(math.comb(n, s) for s in range(min(size_cap, n) + 1))
        if candidates > 1 << settings.enumeration_cap_n:
            raise CapExceededError(f"{candidates} candidate sets exceed the enumeration cap")
        bits, _ = _best_of(inst, masks_up_to_size(n, size_cap), inst.f.value_bits)
        solution = _solution(inst, bits)
        logger.info(f"Multi-agent optimum over |S| <= {size_cap}: S={solution.S}, g={solution.objective}")
        return solution

    ensure_cap(n, what="multi-agent exhaustive solve")
    table = inst.f.table()

    def scan(start: int, stop: int):
        g = _float_objectives(table, inst.costs, start, stop)
        top = g.max()
        keep = np.flatnonzero(g >= top - _SCREEN_MARGIN * max(1.0, abs(top)))
        return top, keep + start, g[keep]

    parts = map_ranges(scan, 1 << n)
    top = max(part[0] for part in parts)
    margin = _SCREEN_MARGIN * max(1.0, abs(top))
    screened = [int(m) for _, masks, values in parts for m, v in zip(masks, values) if v >= top - margin]

    if inst.exact:
        bits, _ = _best_of(inst, screened, table.__getitem__)
    else:
        near = [m for _, masks, values in parts
                for m, v in zip(masks, values) if v >= top - settings.tolerance]
        bits = int(min(near))
    solution = _solution(inst, bits)
    logger.info(f"Multi-agent optimum over {1 << n} sets: S={solution.S}, g={solution.objective}")
    return solution


class PseudoSymmetricFn(SetFunction):
    """f(S) = h(|S|) + v * 1[S = T]."""

    kind = "pseudo-symmetric"

    def __init__(self, profile: Sequence[Number], special_set: ItemSet, bonus: Number,
                 normalize_by: Number = 1):
        super().__init__(len(profile) - 1, normalize_by)
        self.profile = tuple(exact_or_float(h) for h in profile)
        self.special_set = special_set
        self.bonus = exact_or_float(bonus)

    def spec(self) -> "PseudoSymmetricSpec":
        """Validated spec of this function; raises GadgetConstructionError when the bonus breaks the class."""
        return PseudoSymmetricSpec(profile=self.profile, special_set=self.special_set, bonus=self.bonus)

    def _data_exact(self) -> bool:
        return all_exact(self.profile) and is_exact(self.bonus)

    def _evaluate(self, bits: int) -> Number:
        value = self.profile[bits.bit_count()]
        return value + self.bonus if bits == self.special_set.bits else value

    def _build_table(self) -> ValueTable:
        sizes = popcounts(self.n)
        special = self.special_set.bits
        if self._data_exact():
            denominator = lcm_denominator(list(self.profile) + [self.bonus])
            levels = int_array(to_fraction(h) * denominator for h in self.profile)
            data = levels[sizes]
            data[special] = data[special] + int(to_fraction(self.bonus) * denominator)
            return ValueTable(data, denominator, True)
        data = np.array([float(h) for h in self.profile], dtype=np.float64)[sizes]
        data[special] += float(self.bonus)
        return ValueTable(data, 1, False)


@dataclass(frozen=True)
class PseudoSymmetricSpec:
    """
    A symmetric profile h(0..n) plus a bonus v on one special set T.

    Construction validates the invariants, including an exhaustive monotonicity
    and submodularity check when n is within the class-check cap.
    """

    profile: Tuple[Number, ...]
    special_set: ItemSet
    bonus: Number

    def __post_init__(self):
        profile = tuple(exact_or_float(h) for h in self.profile)
        object.__setattr__(self, "profile", profile)
        object.__setattr__(self, "bonus", exact_or_float(self.bonus))
        n = len(profile) - 1
        if n < 1:
            raise GadgetConstructionError("Profile must cover at least one agent")
        if self.special_set.n != n:
            raise DimensionError(f"Special set over {self.special_set.n} items, profile over {n}")
        if profile[0] != 0:
            raise GadgetConstructionError(f"Profile must start at h(0) = 0, got {profile[0]}")
        if any(b < a for a, b in zip(profile, profile[1:])):
            raise GadgetConstructionError("Profile must be non-decreasing")
        if self.bonus < 0:
            raise GadgetConstructionError("Bonus must be non-negative")
        if not len(self.special_set):
            raise GadgetConstructionError("Special set must be non-empty")
        if n <= settings.class_check_cap_n:
            report = check_classes(self.function())
            if not report.submodular:
                i, S, S2 = report.submodular_witness
                raise GadgetConstructionError(f"Not submodular: item {i + 1} at {S} vs {S2}")
            if not report.monotone:
                i, S = report.monotone_witness
                raise GadgetConstructionError(f"Not monotone: adding item {i + 1} to {S}")
        else:
            logger.warning(f"Pseudo-symmetric spec over n={n} is not checked exhaustively")

    @property
    def n(self) -> int:
        return len(self.profile) - 1

    def function(self) -> PseudoSymmetricFn:
        return PseudoSymmetricFn(self.profile, self.special_set, self.bonus)


def ptas_candidates(inst: MultiAgentInstance, epsilon: Number) -> List[ItemSet]:
    """
    Candidate family of the pseudo-symmetric PTAS, deduplicated and sorted by bitmask:
    the empty set, every prefix of the cost-sorted agent order, and every set of at
    most floor(2/epsilon) agents.
    """
    epsilon = parse_number(epsilon)
    if not epsilon > 0:
        raise PreconditionError(f"epsilon must be positive, got {epsilon}")
    n = inst.n
    order = sorted(range(n), key=lambda i: (inst.costs[i], i))
    masks = {0}
    prefix = 0
    for i in order:
        prefix |= 1 << i
        masks.add(prefix)
    limit = min(n, math.floor(Fraction(2) / epsilon))
    masks.update(masks_up_to_size(n, limit))
    return [ItemSet(bits, n) for bits in sorted(masks)]


def solve_ptas_pseudosymmetric(inst: MultiAgentInstance, epsilon: Number) -> MultiAgentSolution:
    """
    (1 - epsilon)-approximation for pseudo-symmetric submodular instances.

    Costs need not be pre-sorted: prefixes follow the ascending-cost order of the
    original agent indices, so the answer needs no remapping.

    Args:
        inst: instance whose f is a monotone submodular PseudoSymmetricFn
        epsilon: accuracy parameter (values with 2/epsilon >= n make the search exhaustive)

    Returns:
        MultiAgentSolution: best candidate by g, ties to the smaller bitmask
    """
    if not isinstance(inst.f, PseudoSymmetricFn):
        raise PreconditionError("The PTAS needs a pseudo-symmetric success function")
    try:
        inst.f.spec()
    except GadgetConstructionError as e:
        raise PreconditionError(f"The PTAS needs a monotone submodular pseudo-symmetric function: {e}") from e
    candidates = ptas_candidates(inst, epsilon)
    bits, _ = _best_of(inst, [S.bits for S in candidates], inst.f.value_bits)
    solution = _solution(inst, bits)
    logger.info(f"PTAS over {len(candidates)} candidates (epsilon={epsilon}): S={solution.S}, g={solution.objective}")
    return solution
