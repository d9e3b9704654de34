"""Route compression into via edges, and the node-based variant.

A route is stored as the short list of edges ("vias") at which it stops
being the unique shortest continuation; everything between two vias is
recovered later by a shortest-path query. Three scan strategies produce
the identical minimal via list and differ only in how many uniqueness
queries they spend: a linear sweep, a binary search for each longest
unique prefix, and a doubling probe that narrows the same prefix.

The node-based variant works on a preprocessed graph in which every
single edge is a unique shortest path (split_non_unique_edges), which
lets it store one node per break instead of a full edge pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .graph import EdgeRef, Graph, Path, path_cost, validate_path
from .shortest_path import ShortestPathEngine


class IntegrityError(Exception):
    """Decompression cannot reproduce the route (stale or mismatched data)."""


@dataclass(frozen=True)
class ViaEdgeRepr:
    """Compressed route: endpoints plus the via edges, in path order."""

    source: int
    target: int
    vias: tuple[EdgeRef, ...]


@dataclass(frozen=True)
class ViaNodeRepr:
    """Compressed route over a split graph: endpoints plus via nodes."""

    source: int
    target: int
    vias: tuple[int, ...]


@dataclass(frozen=True)
class SplitMapping:
    """Records which edges gained a midpoint during splitting."""

    original_node_count: int
    midpoint_of: dict[EdgeRef, int]
    split_edge_of: dict[int, EdgeRef]


_Check = Callable[[int, int], bool]


def _checker(engine: ShortestPathEngine, nodes: Sequence[int], prefix_cost: Sequence[int]) -> _Check:
    unique = engine.unique_shortest

    def check(i: int, j: int) -> bool:
        # Edges i..j inclusive; an empty range is trivially unique.
        if j < i:
            return True
        return unique(nodes[i], nodes[j + 1], prefix_cost[j + 1] - prefix_cost[i])

    return check


def _prefix_binary(check: _Check, j: int, k: int) -> int:
    """Largest q in {j-1, .., k} with edges j..q a unique shortest path.

    Bracket invariant: prefix through lo is unique (lo = j-1 is the empty
    prefix), prefix through hi is not (hi = k+1 is past the end).
    """
    lo, hi = j - 1, k + 1
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if check(j, mid):
            lo = mid
        else:
            hi = mid
    return lo


def _prefix_gallop(check: _Check, j: int, k: int) -> int:
    """Same result as _prefix_binary via doubling probes.

    Probe ends are clamped to k; a clamped probe that still passes covers
    the whole range, and the final bracket collapses onto k.
    """
    h = 1
    while True:
        end = j + h - 1
        clamped = end > k
        probe = k if clamped else end
        if not check(j, probe):
            break
        if clamped:
            break
        h *= 2
    lo = j + h // 2 - 1
    hi = min(j + h - 1, k) + 1
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if check(j, mid):
            lo = mid
        else:
            hi = mid
    return lo


def _require_route(graph: Graph, path: Path) -> None:
    if not path.edges:
        raise ValueError("path must be non-empty")
    violation = validate_path(graph, path)
    if violation is not None:
        raise ValueError(f"invalid path at position {violation.position}: {violation.reason}")


def _scan_linear(check: _Check, edge_count: int) -> list[int]:
    via_positions = []
    i = 0
    for j in range(edge_count):
        if not check(i, j):
            via_positions.append(j)
            i = j + 1
    return via_positions


def _scan_prefix(check: _Check, edge_count: int, prefix: Callable[[_Check, int, int], int]) -> list[int]:
    via_positions = []
    i = 0
    while i < edge_count:
        q = prefix(check, i, edge_count - 1)
        if q < edge_count - 1:
            via_positions.append(q + 1)
        i = q + 2
    return via_positions


def _via_edges(engine: ShortestPathEngine, path: Path, prefix) -> ViaEdgeRepr:
    _require_route(engine.graph, path)
    nodes = path.nodes()
    prefix_cost = [0]
    for tail, head in path.edges:
        prefix_cost.append(prefix_cost[-1] + engine.graph.weight(tail, head))
    check = _checker(engine, nodes, prefix_cost)
    if prefix is None:
        positions = _scan_linear(check, len(path))
    else:
        positions = _scan_prefix(check, len(path), prefix)
    return ViaEdgeRepr(path.source, path.target, tuple(path.edges[p] for p in positions))


def via_edges_linear(engine: ShortestPathEngine, path: Path) -> ViaEdgeRepr:
    """Minimal via edges by a left-to-right sweep; one query per path edge."""
    return _via_edges(engine, path, None)


def via_edges_binary(engine: ShortestPathEngine, path: Path) -> ViaEdgeRepr:
    """Same result as the linear sweep, via binary prefix searches."""
    return _via_edges(engine, path, _prefix_binary)


def via_edges_gallop(engine: ShortestPathEngine, path: Path) -> ViaEdgeRepr:
    """Same result again, via doubling probes; cheapest when vias are few."""
    return _via_edges(engine, path, _prefix_gallop)


def _max_prefix(engine: ShortestPathEngine, path: Path, j: int, k: int, prefix) -> int:
    _require_route(engine.graph, path)
    if not (1 <= j <= k <= len(path)):
        raise ValueError(f"need 1 <= j <= k <= {len(path)}, got j={j} k={k}")
    nodes = path.nodes()
    prefix_cost = [0]
    for tail, head in path.edges:
        prefix_cost.append(prefix_cost[-1] + engine.graph.weight(tail, head))
    check = _checker(engine, nodes, prefix_cost)
    return prefix(check, j - 1, k - 1) + 1


def max_prefix_sp_binary(engine: ShortestPathEngine, path: Path, j: int, k: int) -> int:
    """Largest 1-based q in {j-1, .., k} such that edges j..q form a unique
    shortest path; j-1 when even the single edge j does not."""
    return _max_prefix(engine, path, j, k, _prefix_binary)


def max_prefix_sp_gallop(engine: ShortestPathEngine, path: Path, j: int, k: int) -> int:
    """As max_prefix_sp_binary, by galloping probes."""
    return _max_prefix(engine, path, j, k, _prefix_gallop)


def decompress_via_edges(engine: ShortestPathEngine, repr_: ViaEdgeRepr) -> Path:
    """Rebuild the exact route: unique shortest gaps stitched around vias.

    Raises IntegrityError when a gap is unreachable or ambiguous, or a via
    edge is missing from the graph - both mean the representation was not
    produced against this graph.
    """
    graph = engine.graph
    edges: list[EdgeRef] = []
    current = repr_.source
    for tail, head in repr_.vias:
        if current != tail:
            result = engine.query(current, tail)
            if result.multiplicity != 1:
                raise IntegrityError(f"gap {current}->{tail} is not a unique shortest path")
            edges.extend(result.witness.edges)
        if graph.weight(tail, head) is None:
            raise IntegrityError(f"via edge ({tail}, {head}) is not in the graph")
        edges.append((tail, head))
        current = head
    if current != repr_.target:
        result = engine.query(current, repr_.target)
        if result.multiplicity != 1:
            raise IntegrityError(f"gap {current}->{repr_.target} is not a unique shortest path")
        edges.extend(result.witness.edges)
    return Path(tuple(edges))


def split_non_unique_edges(graph: Graph) -> tuple[Graph, SplitMapping]:
    """Return a graph in which every single edge is a unique shortest path.

    All weights are doubled; each edge that is not already the unique
    shortest route between its endpoints is then replaced by two
    half-weight edges through a fresh midpoint node. Distances between
    original nodes come out exactly doubled, and uniqueness of multi-edge
    routes is untouched, because the midpoint rewiring is a one-to-one
    reshaping of the old paths.
    """
    engine = ShortestPathEngine(graph)
    midpoint_of: dict[EdgeRef, int] = {}
    split_edge_of: dict[int, EdgeRef] = {}
    new_edges: list[tuple[int, int, int]] = []
    next_node = graph.node_count
    for tail, head, weight in graph.edges():
        if engine.unique_shortest(tail, head, weight):
            new_edges.append((tail, head, 2 * weight))
        else:
            midpoint = next_node
            next_node += 1
            midpoint_of[(tail, head)] = midpoint
            split_edge_of[midpoint] = (tail, head)
            new_edges.append((tail, midpoint, weight))
            new_edges.append((midpoint, head, weight))
    split = Graph(next_node, new_edges)
    return split, SplitMapping(graph.node_count, midpoint_of, split_edge_of)


def lift_path(mapping: SplitMapping, path: Path) -> Path:
    """Rewrite an original-graph path into the split graph."""
    edges: list[EdgeRef] = []
    for tail, head in path.edges:
        midpoint = mapping.midpoint_of.get((tail, head))
        if midpoint is None:
            edges.append((tail, head))
        else:
            edges.append((tail, midpoint))
            edges.append((midpoint, head))
    return Path(tuple(edges))


def project_path(mapping: SplitMapping, path: Path) -> Path:
    """Rewrite a split-graph path back onto original edges."""
    edges: list[EdgeRef] = []
    pending: tuple[int, int] | None = None  # (midpoint, original tail)
    for tail, head in path.edges:
        if pending is not None:
            midpoint, original_tail = pending
            if tail != midpoint or mapping.split_edge_of[midpoint] != (original_tail, head):
                raise ValueError(f"midpoint {midpoint} is not followed by its other half")
            edges.append((original_tail, head))
            pending = None
        elif head in mapping.split_edge_of:
            pending = (head, tail)
        elif tail in mapping.split_edge_of:
            raise ValueError(f"path enters midpoint {tail} without its first half")
        else:
            edges.append((tail, head))
    if pending is not None:
        raise ValueError(f"path ends inside midpoint {pending[0]}")
    return Path(tuple(edges))


def via_nodes(engine: ShortestPathEngine, path: Path) -> ViaNodeRepr:
    """Compress a split-graph path into via nodes.

    Scans for the longest unique-shortest prefix from the current anchor;
    the node where it ends becomes a via, and the next segment starts at
    that node, so the breaking edge is re-covered by the next scan. On a
    split graph a single edge is always unique, which guarantees
    progress; elsewhere the scan may stall, which is reported as an error.
    """
    _require_route(engine.graph, path)
    nodes = path.nodes()
    prefix_cost = [0]
    for tail, head in path.edges:
        prefix_cost.append(prefix_cost[-1] + engine.graph.weight(tail, head))
    check = _checker(engine, nodes, prefix_cost)
    edge_count = len(path)
    vias: list[int] = []
    i = 0
    while i < edge_count:
        q = _prefix_gallop(check, i, edge_count - 1)
        if q == edge_count - 1:
            break
        if q < i:
            raise ValueError(
                f"edge ({nodes[i]}, {nodes[i + 1]}) is not a unique shortest path; split the graph first"
            )
        vias.append(nodes[q + 1])
        i = q + 1
    return ViaNodeRepr(path.source, path.target, tuple(vias))


def decompress_via_nodes(engine: ShortestPathEngine, repr_: ViaNodeRepr) -> Path:
    """Stitch the unique shortest paths between consecutive anchors."""
    anchors = (repr_.source,) + repr_.vias + (repr_.target,)
    edges: list[EdgeRef] = []
    for start, stop in zip(anchors, anchors[1:]):
        if start == stop:
            continue
        result = engine.query(start, stop)
        if result.multiplicity != 1:
            raise IntegrityError(f"gap {start}->{stop} is not a unique shortest path")
        edges.extend(result.witness.edges)
    return Path(tuple(edges))
