from .bitmask import ensure_cap, iter_bits, mask_of
from .graphs import graph_from_edges, max_clique_bruteforce
from .parallel import map_items, map_ranges

__all__ = ["ensure_cap", "iter_bits", "mask_of", "graph_from_edges", "max_clique_bruteforce", "map_items", "map_ranges"]
