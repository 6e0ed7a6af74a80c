"""Exact S-packing and (d, n)-packing colorings of graphs.

Includes generators for base-3 Sierpinski graphs and H-graphs, a
backtracking solver, the T^l -> S^k lifting construction and the
transfer-digraph decision procedure for packing colorings of H-graphs.
"""

from .generators import gen_h, gen_hp, gen_sierpinski, gen_t
from .graph import INFINITE, DistanceMatrix, Graph, all_pairs_distances, build_graph, diameter
from .packing import Coloring, PackingSequence, Violation, color_classes, packing_sequence, verify_coloring
from .solver import SearchConfig, SolveResult, Status, lower_bound, solve_decision, solve_min_colors

__all__ = [
    "INFINITE", "Coloring", "DistanceMatrix", "Graph", "PackingSequence", "SearchConfig",
    "SolveResult", "Status", "Violation", "all_pairs_distances", "build_graph", "color_classes",
    "diameter", "gen_h", "gen_hp", "gen_sierpinski", "gen_t", "lower_bound", "packing_sequence",
    "solve_decision", "solve_min_colors", "verify_coloring",
]
