import logging
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from ..config.settings import settings
from ..core.exceptions import CapExceededError, InstanceParseError
from .bitmask import iter_bits

logger = logging.getLogger(__name__)


def graph_from_edges(vertices: int, edges: Sequence[Sequence[int]], one_based: bool = True) -> nx.Graph:
    """
    Build a simple undirected graph on vertices 0..vertices-1.

    Args:
        vertices: vertex count
        edges: vertex pairs, 1-based when one_based (the JSON convention)
        one_based: whether edge endpoints start at 1

    Returns:
        nx.Graph: the graph

    Raises:
        InstanceParseError: on self-loops or endpoints outside the vertex range
    """
    if vertices < 0:
        raise InstanceParseError(f"Vertex count must be non-negative, got {vertices}")
    offset = 1 if one_based else 0
    graph = nx.Graph()
    graph.add_nodes_from(range(vertices))
    for edge in edges:
        if len(edge) != 2:
            raise InstanceParseError(f"Edge {list(edge)} must have two endpoints")
        u, v = (int(x) - offset for x in edge)
        if not (0 <= u < vertices and 0 <= v < vertices):
            raise InstanceParseError(f"Edge {list(edge)} leaves the vertex range")
        if u == v:
            raise InstanceParseError(f"Self-loop at vertex {u + offset}")
        graph.add_edge(u, v)
    return graph


def graph_edges(graph: nx.Graph, one_based: bool = True) -> List[List[int]]:
    """Sorted edge list with u < v, 1-based by default."""
    offset = 1 if one_based else 0
    return sorted([min(u, v) + offset, max(u, v) + offset] for u, v in graph.edges())


def relabeled(graph: nx.Graph) -> nx.Graph:
    """Copy of the graph with vertices renamed 0..|V|-1 in sorted order."""
    return nx.convert_node_labels_to_integers(graph, ordering="sorted")


def closed_neighborhoods(graph: nx.Graph) -> List[int]:
    """Bitmask N[v] = N(v) + v for every vertex of a 0..|V|-1 labeled graph."""
    masks = [1 << v for v in range(graph.number_of_nodes())]
    for u, v in graph.edges():
        masks[u] |= 1 << v
        masks[v] |= 1 << u
    return masks


def random_graph(vertices: int, density: float, rng: np.random.Generator) -> nx.Graph:
    """G(n, p) graph drawn from a numpy generator so runs are reproducible from one seed."""
    graph = nx.Graph()
    graph.add_nodes_from(range(vertices))
    if vertices > 1:
        draws = rng.random((vertices, vertices))
        for u in range(vertices):
            for v in range(u + 1, vertices):
                if draws[u, v] < density:
                    graph.add_edge(u, v)
    return graph


def graph_battery(count: int, max_vertices: int, seed: int) -> List[nx.Graph]:
    """Seeded graphs with 1..max_vertices vertices and densities spread over (0, 1)."""
    rng = np.random.default_rng(seed)
    graphs = []
    for _ in range(count):
        vertices = int(rng.integers(1, max_vertices + 1))
        density = float(rng.uniform(0.1, 0.9))
        graphs.append(random_graph(vertices, density, rng))
    return graphs


def max_clique_bruteforce(graph: nx.Graph, cap: Optional[int] = None) -> Tuple[int, List[int]]:
    """
    Exact maximum clique by branch and bound over bitmask candidate sets.

    Vertices are tried in descending degree order; a branch is cut when the current
    clique plus every remaining candidate cannot beat the incumbent.

    Args:
        graph: simple undirected graph
        cap: largest vertex count accepted (defaults to settings.enumeration_cap_n)

    Returns:
        Tuple of omega(G) and one maximum clique (0-based, sorted). The empty graph
        has omega 0.

    Raises:
        CapExceededError: if the graph has more vertices than the cap
    """
    cap = settings.enumeration_cap_n if cap is None else cap
    graph = relabeled(graph)
    n = graph.number_of_nodes()
    if n > cap:
        raise CapExceededError(f"max clique needs |V| <= {cap}, got {n}")
    if n == 0:
        return 0, []

    neighbors = [mask & ~(1 << v) for v, mask in enumerate(closed_neighborhoods(graph))]
    order = sorted(range(n), key=lambda v: (-neighbors[v].bit_count(), v))
    rank: Dict[int, int] = {v: r for r, v in enumerate(order)}
    best = [0]

    def branch(current: int, candidates: int) -> None:
        if not candidates:
            if current.bit_count() > best[0].bit_count():
                best[0] = current
            return
        if current.bit_count() + candidates.bit_count() <= best[0].bit_count():
            return
        for v in sorted(iter_bits(candidates), key=rank.__getitem__):
            if current.bit_count() + candidates.bit_count() <= best[0].bit_count():
                return
            branch(current | 1 << v, candidates & neighbors[v])
            candidates &= ~(1 << v)

    branch(0, (1 << n) - 1)
    clique = sorted(iter_bits(best[0]))
    logger.debug(f"Maximum clique of size {len(clique)} on {n} vertices")
    return len(clique), clique
