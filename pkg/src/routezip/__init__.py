"""Route compression against a shared road graph.

A route is stored as a handful of anchor edges or nodes plus the promise
that everything between them is the unique shortest path, as a
contraction-hierarchy path, or as both tricks stacked. Decompression
reproduces the original route edge for edge or refuses loudly.
"""

from .dimacs import (
    DimacsError,
    DomainError,
    ParseError,
    RangeError,
    dump_dimacs,
    dump_path,
    load_dimacs,
    load_path,
)
from .generate import (
    chain_graph,
    diamond_graph,
    grid_graph,
    perturbed_shortest_path,
    random_walk_path,
    waypoint_tour_path,
)
from .graph import (
    INFINITY,
    MAX_COST,
    CostOverflowError,
    EdgeRef,
    Graph,
    Path,
    PathViolation,
    concat,
    path_cost,
    validate_path,
)
from .hierarchy import (
    BuildParams,
    ChEdge,
    ChPath,
    ChQueryResult,
    CombinedRepr,
    Hierarchy,
    HierarchyFormatError,
    build as build_hierarchy,
    ch_query,
    compress_combined,
    compress_with_ch,
    decompress_combined,
    load as load_hierarchy,
    save as save_hierarchy,
    unpack,
)
from .shortest_path import ShortestPathEngine, SpResult
from .via_edges import (
    IntegrityError,
    SplitMapping,
    ViaEdgeRepr,
    ViaNodeRepr,
    decompress_via_edges,
    decompress_via_nodes,
    lift_path,
    max_prefix_sp_binary,
    max_prefix_sp_gallop,
    project_path,
    split_non_unique_edges,
    via_edges_binary,
    via_edges_gallop,
    via_edges_linear,
    via_nodes,
)
from .wire import (
    CodecError,
    FormatError,
    LengthError,
    Method,
    RouteMessage,
    UnknownMethodError,
    combined_from_message,
    ch_path_from_message,
    decode,
    encode,
    message_from_ch_path,
    message_from_combined,
    message_from_via_edges,
    message_from_via_nodes,
    via_edges_from_message,
    via_nodes_from_message,
)

__version__ = "0.1.0"
