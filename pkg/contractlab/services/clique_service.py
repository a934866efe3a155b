"""
Clique-size classification and approximation through a contract oracle.

A contract oracle takes a multi-action instance and returns an alpha whose principal
utility is within its declared ratio of the optimum. On the clique gadget for
(G, delta), SMALL means alpha0 < M/(M+1). Running this for delta = 1, 2, 4, ... and
returning the largest delta judged LARGE gives a beta^2/4 approximation of omega(G).
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, List

import networkx as nx

from ..core.exceptions import PreconditionError
from ..core.numeric import Number, format_number, parse_number, to_fraction
from ..gadgets.clique import CliqueGadgetFn, clique_xos_instance
from ..models import multiaction
from ..models.multiaction import MultiActionInstance
from ..models.schemas import CliqueReportDocument
from ..utils.parallel import map_items

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ContractOracle:
    """An alpha-returning contract algorithm together with the ratio it guarantees."""

    name: str
    solve: Callable[[MultiActionInstance], Number]
    beta: Number


def exact_oracle() -> ContractOracle:
    """The exact solver; a beta-approximation for every beta."""
    return ContractOracle(name="exact", solve=lambda inst: multiaction.solve_exact(inst).alpha, beta=Fraction(1))


def degraded_oracle(beta: Number) -> ContractOracle:
    """
    Returns the worse of the two gadget breakpoints M/(M+1+epsilon) and M/(M+1) whenever
    its utility is still at least beta times the optimum, and the better one otherwise.
    Only valid on clique-gadget instances.
    """
    beta = parse_number(beta)

    def solve(inst: MultiActionInstance) -> Number:
        gadget = inst.f
        if not isinstance(gadget, CliqueGadgetFn):
            raise PreconditionError("The degraded oracle only answers clique-gadget instances")
        low = gadget.M / (gadget.M + 1 + gadget.epsilon)
        high = gadget.M / (gadget.M + 1)
        optimum = multiaction.solve_exact(inst).principal_utility
        ranked = sorted(((multiaction.principal_utility(inst, a), a) for a in (low, high)))
        (worse_utility, worse), (_, better) = ranked
        return worse if worse_utility >= beta * optimum else better

    return ContractOracle(name=f"degraded({beta})", solve=solve, beta=beta)


class CliqueVerdict(str, Enum):
    SMALL = "SMALL"
    LARGE = "LARGE"


def classify(alpha0: Number, M: Number) -> CliqueVerdict:
    """SMALL iff alpha0 < M/(M+1), compared as exact rationals."""
    threshold = to_fraction(M) / (to_fraction(M) + 1)
    return CliqueVerdict.SMALL if to_fraction(alpha0) < threshold else CliqueVerdict.LARGE


@dataclass(frozen=True)
class DistinguishResult:
    delta: int
    verdict: CliqueVerdict
    alpha: Number
    M: Fraction


@dataclass
class CliqueApproximation:
    estimate: int
    runs: List[DistinguishResult] = field(default_factory=list)

    @property
    def verdicts(self) -> Dict[int, CliqueVerdict]:
        return {run.delta: run.verdict for run in self.runs}

    @property
    def alphas(self) -> Dict[int, Number]:
        return {run.delta: run.alpha for run in self.runs}


class CliqueService:
    """
    Service class to classify and approximate clique sizes with a contract oracle.
    """

    def __init__(self, oracle: ContractOracle, beta: Number, normalize: bool = False):
        beta = parse_number(beta)
        if not 0 < beta < 1:
            raise PreconditionError(f"beta must lie in (0, 1), got {beta}")
        self.oracle = oracle
        self.beta = beta
        self.normalize = normalize

    def run(self, graph: nx.Graph, delta: int) -> DistinguishResult:
        """Build the gadget for (graph, delta), query the oracle and classify its alpha."""
        instance, gadget = clique_xos_instance(graph, delta, self.beta, normalize=self.normalize)
        alpha = self.oracle.solve(instance)
        if not 0 <= alpha <= 1:
            raise PreconditionError(f"Oracle {self.oracle.name} returned alpha = {alpha} outside [0, 1]")
        verdict = classify(alpha, gadget.M)
        logger.debug(f"delta={delta}: oracle alpha={alpha}, M={gadget.M}, verdict={verdict.value}")
        return DistinguishResult(delta=delta, verdict=verdict, alpha=alpha, M=gadget.M)

    def distinguish(self, graph: nx.Graph, delta: int) -> CliqueVerdict:
        """
        SMALL when omega(G) <= delta and LARGE when omega(G) >= 2 delta / beta^2, provided
        the oracle honors beta; either answer in between.
        """
        return self.run(graph, delta).verdict

    def approximate(self, graph: nx.Graph) -> CliqueApproximation:
        """
        Run the classification for delta = 2^i, i = 0..floor(log2 |V|), in parallel.

        Returns:
            CliqueApproximation: 1 when delta = 1 is SMALL, else the largest delta judged
            LARGE, together with every run

        Raises:
            PreconditionError: on a graph without vertices
        """
        vertices = graph.number_of_nodes()
        if vertices < 1:
            raise PreconditionError("Clique approximation needs at least one vertex")
        deltas = [1 << i for i in range(vertices.bit_length())]
        runs = map_items(lambda delta: self.run(graph, delta), deltas)
        if runs[0].verdict == CliqueVerdict.SMALL:
            estimate = 1
        else:
            estimate = max(run.delta for run in runs if run.verdict == CliqueVerdict.LARGE)
        logger.info(
            f"Clique estimate {estimate} for |V|={vertices} with oracle {self.oracle.name}: "
            + ", ".join(f"{run.delta}:{run.verdict.value}" for run in runs)
        )
        return CliqueApproximation(estimate=estimate, runs=runs)

    def approx_clique(self, graph: nx.Graph) -> int:
        return self.approximate(graph).estimate


def distinguish(graph: nx.Graph, delta: int, beta: Number, oracle: ContractOracle) -> CliqueVerdict:
    return CliqueService(oracle, beta).distinguish(graph, delta)


def approx_clique(graph: nx.Graph, beta: Number, oracle: ContractOracle) -> int:
    return CliqueService(oracle, beta).approx_clique(graph)


def clique_report_document(approximation: CliqueApproximation, oracle: ContractOracle,
                           beta: Number) -> CliqueReportDocument:
    return CliqueReportDocument(
        omega_estimate=approximation.estimate,
        verdicts={str(run.delta): run.verdict.value for run in approximation.runs},
        alphas={str(run.delta): format_number(run.alpha) for run in approximation.runs},
        oracle=oracle.name,
        beta=format_number(beta),
    )
