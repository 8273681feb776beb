"""Compressed bit-vector reachability indexes and label-order-constrained
path queries over edge-labeled directed graphs."""

from .bitvec import (
    CompressedBitVector,
    build_from_positions,
    choose_representation,
    count_ones,
    intersect,
    intersect3,
    is_empty,
    iter_ones,
)
from .engine import LocrQuery, QueryResult, QueryTimeout, evaluate
from .graph import (
    CollapsedGraph,
    LabeledGraph,
    collapse,
    collapse_sccs,
    compute_topo_depth,
    find_sccs,
    load_graph,
    parse_edge_list,
)
from .index import BitPathIndex, build_index, load_index, save_index

__version__ = "0.1.0"

__all__ = [
    "BitPathIndex",
    "CollapsedGraph",
    "CompressedBitVector",
    "LabeledGraph",
    "LocrQuery",
    "QueryResult",
    "QueryTimeout",
    "build_from_positions",
    "build_index",
    "choose_representation",
    "collapse",
    "collapse_sccs",
    "compute_topo_depth",
    "count_ones",
    "evaluate",
    "find_sccs",
    "intersect",
    "intersect3",
    "is_empty",
    "iter_ones",
    "load_graph",
    "load_index",
    "parse_edge_list",
    "save_index",
    "__version__",
]
