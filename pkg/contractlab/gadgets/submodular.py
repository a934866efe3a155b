"""
Coverage gadgets for the submodular hardness reductions.

A conforming coverage function has every singleton worth exactly 1/k. Planted
instances hide k items whose union is the whole universe; the multi-agent gadget
prices every agent at 1/(2k^2), and the multi-action gadget adds an anchor action
covering a second copy of the universe.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List

from ..core.exceptions import GadgetConstructionError
from ..core.numeric import Number, parse_number
from ..models.itemset import ItemSet
from ..models.multiaction import RATIONAL, MultiActionInstance
from ..models.multiagent import MultiAgentInstance
from ..models.setfn import CoverageFn, SetFunction, best_set_of_size

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlantedCover:
    function: CoverageFn
    planted: ItemSet


def planted_cover_coverage(k: int, copies_per_block: int = 1) -> PlantedCover:
    """
    Coverage over k blocks of k elements with k planted items and k * copies_per_block decoys.

    Planted item b covers block b. Decoy (c, d) takes element (d + c b) mod k of every
    block b, so it straddles all blocks and, like every planted item, covers 1/k of
    the universe.
    """
    if k < 1:
        raise GadgetConstructionError(f"k must be positive, got {k}")
    if copies_per_block < 0:
        raise GadgetConstructionError(f"copies_per_block must be non-negative, got {copies_per_block}")
    planted = [[b * k + e for e in range(k)] for b in range(k)]
    decoys = [[b * k + (d + c * b) % k for b in range(k)]
              for c in range(copies_per_block) for d in range(k)]
    function = CoverageFn.from_element_lists(k * k, planted + decoys)
    return PlantedCover(function=function, planted=ItemSet.from_indices(range(k), function.n))


def check_singletons(fprime: SetFunction, k: int) -> None:
    """Raise GadgetConstructionError unless every singleton is worth exactly 1/k."""
    target = Fraction(1, k)
    for i in range(fprime.n):
        value = fprime.value(ItemSet.from_indices([i], fprime.n))
        if value != target:
            raise GadgetConstructionError(f"f({{{i + 1}}}) = {value}, expected 1/{k}")


def multiagent_submodular_gadget(k: int, fprime: CoverageFn) -> MultiAgentInstance:
    """
    Multi-agent instance (A, f', 1/(2k^2) for every agent).

    Raises:
        GadgetConstructionError: if some singleton of f' is not 1/k
    """
    check_singletons(fprime, k)
    cost = Fraction(1, 2 * k * k)
    logger.info(f"Multi-agent coverage gadget: k={k}, {fprime.n} agents, cost {cost}")
    return MultiAgentInstance(costs=tuple(cost for _ in range(fprime.n)), f=fprime)


def anchored_coverage(fprime: CoverageFn) -> CoverageFn:
    """
    f(S) = (f'(S - anchor) + 1[anchor in S]) / 2 as a coverage over U' x {0, 1}.

    Items of f' keep their covers inside the first copy of U'; the anchor, placed
    last, covers the whole second copy.
    """
    size = fprime.universe_size
    anchor = ((1 << size) - 1) << size
    return CoverageFn(2 * size, list(fprime.covers) + [anchor])


def multiaction_submodular_gadget(k: int, fprime: CoverageFn, beta: Number) -> MultiActionInstance:
    """
    Multi-action instance over the anchored coverage.

    Actions of f' cost (1 - beta^2)/(2k); the anchor (the last action) costs
    (1 - beta^3)/2. Below alpha = 1 - beta^2 the agent takes no action.

    Args:
        k: singleton parameter of f'
        fprime: conforming coverage function
        beta: rational in (0, 1/12)

    Returns:
        MultiActionInstance: rational-mode instance with |A'| + 1 actions

    Raises:
        GadgetConstructionError: on a non-conforming f' or beta out of range
    """
    beta = parse_number(beta)
    if not 0 < beta < Fraction(1, 12):
        raise GadgetConstructionError(f"beta must lie in (0, 1/12), got {beta}")
    check_singletons(fprime, k)
    action_cost = (1 - beta ** 2) / (2 * k)
    anchor_cost = (1 - beta ** 3) / 2
    f = anchored_coverage(fprime)
    logger.info(f"Multi-action coverage gadget: k={k}, beta={beta}, {f.n} actions, anchor cost {anchor_cost}")
    return MultiActionInstance(costs=tuple([action_cost] * fprime.n + [anchor_cost]), f=f, numeric=RATIONAL)


@dataclass(frozen=True)
class CoverageGapRow:
    size: int
    best_value: Fraction
    bound: float
    holds: bool
    best_set: ItemSet


def coverage_gap_report(f: SetFunction, k: int, max_multiple: Number, eps: float) -> List[CoverageGapRow]:
    """
    Exhaustive best coverage per size s < max_multiple * k against 1 - e^(-s/k) + eps.

    The report records, it does not judge: on satisfiable-style inputs the planted
    size-k cover exceeds the bound by construction.
    """
    limit = min(f.n, math.ceil(float(max_multiple) * k) - 1)
    rows = []
    for size in range(1, limit + 1):
        best_value, best_set = best_set_of_size(f, size)
        bound = 1 - math.exp(-size / k) + eps
        rows.append(CoverageGapRow(size=size, best_value=best_value, bound=bound,
                                   holds=float(best_value) <= bound, best_set=best_set))
    logger.info(f"Coverage gap report: {sum(r.holds for r in rows)}/{len(rows)} sizes within the bound")
    return rows
