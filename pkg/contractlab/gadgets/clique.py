"""
Clique XOS gadget for the multi-action model.

G' is the input graph plus a fresh delta-clique. With epsilon = 2/beta - 1 and
M = |V'| + epsilon every action costs M and

    f(S) = (M + 1[S is a clique in G']) |S| + min(|S|, delta) epsilon.

The agent's best response is empty below M/(M+1+epsilon), a delta-clique up to
M/(M+1), and a maximum clique of G' from there on.
"""
import logging
from fractions import Fraction
from typing import Tuple

import networkx as nx
import numpy as np

from ..core.exceptions import GadgetConstructionError, PreconditionError
from ..core.numeric import Number, parse_number
from ..models.itemset import ItemSet
from ..models.multiaction import RATIONAL, MultiActionInstance
from ..models.setfn import SetFunction, ValueTable
from ..utils.bitmask import all_masks, iter_bits, popcounts
from ..utils.graphs import closed_neighborhoods, relabeled

logger = logging.getLogger(__name__)


def clique_constants(vertices: int, delta: int, beta: Number) -> Tuple[Fraction, Fraction]:
    """(epsilon, M) for a graph with `vertices` vertices before the delta-clique is added."""
    beta = parse_number(beta)
    if not 0 < beta < 1:
        raise GadgetConstructionError(f"beta must lie in (0, 1), got {beta}")
    if delta < 1:
        raise GadgetConstructionError(f"delta must be a positive integer, got {delta}")
    epsilon = 2 / beta - 1
    return epsilon, vertices + delta + epsilon


class CliqueGadgetFn(SetFunction):
    """f over the vertices of G' (original vertices first, then the added clique)."""

    kind = "clique-xos"

    def __init__(self, graph: nx.Graph, delta: int, beta: Number, normalize_by: Number = 1):
        graph = relabeled(graph)
        self.base_vertices = graph.number_of_nodes()
        self.epsilon, self.M = clique_constants(self.base_vertices, delta, beta)
        self.beta = parse_number(beta)
        self.delta = delta

        extended = graph.copy()
        fresh = range(self.base_vertices, self.base_vertices + delta)
        extended.add_nodes_from(fresh)
        extended.add_edges_from((u, v) for u in fresh for v in fresh if u < v)
        self.graph = extended
        self.closed = closed_neighborhoods(extended)
        super().__init__(extended.number_of_nodes(), normalize_by)

    @property
    def added_clique(self) -> ItemSet:
        return ItemSet.from_indices(range(self.base_vertices, self.n), self.n)

    def _data_exact(self) -> bool:
        return True

    def _is_clique_bits(self, bits: int) -> bool:
        return all(self.closed[v] & bits == bits for v in iter_bits(bits))

    def is_clique(self, S: ItemSet) -> bool:
        self._check_set(S)
        return self._is_clique_bits(S.bits)

    def _evaluate(self, bits: int) -> Number:
        size = bits.bit_count()
        bonus = 1 if self._is_clique_bits(bits) else 0
        return (self.M + bonus) * size + min(size, self.delta) * self.epsilon

    def _build_table(self) -> ValueTable:
        masks = all_masks(self.n)
        sizes = popcounts(self.n)
        clique = np.ones(1 << self.n, dtype=bool)
        for v, closed in enumerate(self.closed):
            has_v = (masks >> v) & 1 == 1
            clique &= ~has_v | ((masks & ~closed) == 0)
        denominator = self.epsilon.denominator
        m_num = int(self.M * denominator)
        eps_num = int(self.epsilon * denominator)
        data = (m_num + clique.astype(np.int64) * denominator) * sizes + np.minimum(sizes, self.delta) * eps_num
        return ValueTable(data.astype(np.int64), denominator, True)

    def clause_weight(self, T: ItemSet) -> Fraction:
        """a^T_i for i in T: M + 1[T clique] + epsilon min(|T|, delta) / |T|."""
        self._check_set(T)
        if not len(T):
            raise PreconditionError("Clause index set T must be non-empty")
        bonus = 1 if self._is_clique_bits(T.bits) else 0
        return self.M + bonus + self.epsilon * Fraction(min(len(T), self.delta), len(T))


def xos_clause_value(gadget: CliqueGadgetFn, T: ItemSet, S: ItemSet) -> Number:
    """
    Value of the additive clause indexed by T at S: |S & T| a^T.

    f is the maximum of these clauses over non-empty T, with the maximum attained
    at T = S.

    Raises:
        PreconditionError: if T is empty
    """
    gadget._check_set(S)
    weight = gadget.clause_weight(T)
    return gadget._normalize(len(S.intersection(T)) * weight)


def clique_xos_instance(graph: nx.Graph, delta: int, beta: Number,
                        normalize: bool = False) -> Tuple[MultiActionInstance, CliqueGadgetFn]:
    """
    The multi-action instance over the clique gadget; every action costs M.

    Args:
        graph: simple undirected graph G
        delta: size of the added clique
        beta: approximation ratio in (0, 1) the gadget is tuned for
        normalize: divide f and the costs by f(V') so that f stays in [0, 1]

    Returns:
        Tuple of the instance and its gadget function

    Raises:
        GadgetConstructionError: if beta or delta is out of range
    """
    gadget = CliqueGadgetFn(graph, delta, beta)
    scale = Fraction(1)
    if normalize:
        scale = gadget.value(ItemSet.full(gadget.n))
        gadget = CliqueGadgetFn(graph, delta, beta, normalize_by=scale)
    costs = tuple(gadget.M / scale for _ in range(gadget.n))
    logger.info(
        f"Clique gadget: |V'|={gadget.n}, delta={delta}, beta={gadget.beta}, "
        f"epsilon={gadget.epsilon}, M={gadget.M}, normalized={normalize}"
    )
    return MultiActionInstance(costs=costs, f=gadget, numeric=RATIONAL), gadget
