"""Contraction hierarchies: construction, queries, and path compression.

Nodes are contracted one by one; whenever removing a node would break a
shortest distance between two of its neighbours, a shortcut edge with
the combined weight is inserted and the removed node recorded as its
middle. The finished hierarchy keeps every surviving edge exactly once
per ordered node pair, tagged original or shortcut, together with the
contraction order. Queries run two upward searches that meet in the
middle; paths come back over hierarchy edges and unpack recursively to
original edges.

The serialized form (.chr) is binary, little-endian:

    magic            4 bytes  b"CHR1"
    node_count       u32
    edge_count       u32
    level            node_count x u32   contraction order, 0 first
    edge records     edge_count x (tail u32, head u32, weight u64, flags u8)
    middle table     one u32 per shortcut, in edge-record order

Edge records are sorted by (tail, head). Flag bit 0 marks a shortcut,
bit 1 an upward edge (level[tail] < level[head]); other bits must be 0.
Loading re-checks every structural invariant and rejects the file on the
first violation.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from heapq import heapify, heappush, heappop
from typing import NamedTuple

from .graph import Graph, INFINITY, Path
from .shortest_path import ShortestPathEngine
from .via_edges import IntegrityError, _checker, _prefix_gallop, _require_route, _scan_prefix


class HierarchyFormatError(ValueError):
    """A .chr stream is truncated, malformed, or breaks an invariant."""


class ChEdge(NamedTuple):
    tail: int
    head: int
    shortcut: bool


@dataclass(frozen=True)
class ChPath:
    """A route over hierarchy edges; shortcut members unpack recursively."""

    edges: tuple[ChEdge, ...] = ()

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    @property
    def source(self) -> int:
        if not self.edges:
            raise ValueError("empty path has no source")
        return self.edges[0].tail

    @property
    def target(self) -> int:
        if not self.edges:
            raise ValueError("empty path has no target")
        return self.edges[-1].head

    def nodes(self) -> tuple[int, ...]:
        if not self.edges:
            return ()
        return (self.edges[0].tail,) + tuple(e.head for e in self.edges)


@dataclass(frozen=True)
class BuildParams:
    """Knobs for construction.

    hop_limit and settle_limit bound each witness search; tighter limits
    build faster but insert more (harmless) shortcuts. node_order forces
    an explicit contraction sequence instead of the priority queue.
    """

    hop_limit: int = 12
    settle_limit: int = 100
    node_order: tuple[int, ...] | None = None


@dataclass(frozen=True)
class ChQueryResult:
    distance: int | float
    path: ChPath | None


class Hierarchy:
    """Search graph plus contraction order; immutable once built."""

    __slots__ = ("node_count", "level", "_edges", "_up_out", "_down_into")

    def __init__(self, node_count: int, level: tuple[int, ...], edges: dict[tuple[int, int], tuple[int, int | None]]):
        self.node_count = node_count
        self.level = level
        self._edges = edges
        up_out: list[list[tuple[int, int]]] = [[] for _ in range(node_count)]
        down_into: list[list[tuple[int, int]]] = [[] for _ in range(node_count)]
        for (tail, head) in sorted(edges):
            weight, _middle = edges[(tail, head)]
            if level[tail] < level[head]:
                up_out[tail].append((head, weight))
            else:
                down_into[head].append((tail, weight))
        self._up_out = tuple(tuple(l) for l in up_out)
        self._down_into = tuple(tuple(l) for l in down_into)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    @property
    def shortcut_count(self) -> int:
        return sum(1 for _w, middle in self._edges.values() if middle is not None)

    def weight(self, tail: int, head: int) -> int | None:
        record = self._edges.get((tail, head))
        return None if record is None else record[0]

    def middle(self, tail: int, head: int) -> int | None:
        """Contracted middle node of a shortcut; None for original edges."""
        record = self._edges.get((tail, head))
        return None if record is None else record[1]

    def is_shortcut(self, tail: int, head: int) -> bool:
        return self.middle(tail, head) is not None

    def edges(self):
        """All edges as (tail, head, weight, middle), sorted by (tail, head)."""
        for (tail, head) in sorted(self._edges):
            weight, middle = self._edges[(tail, head)]
            yield tail, head, weight, middle

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hierarchy):
            return NotImplemented
        return (
            self.node_count == other.node_count
            and self.level == other.level
            and self._edges == other._edges
        )

    def __repr__(self) -> str:
        return f"Hierarchy(nodes={self.node_count}, edges={self.edge_count}, shortcuts={self.shortcut_count})"


def build(graph: Graph, params: BuildParams = BuildParams()) -> Hierarchy:
    """Contract every node and return the finished hierarchy.

    Without a forced order, nodes are picked lazily by priority = edge
    difference + number of already-contracted neighbours, re-evaluated on
    pop, ties broken by node id.
    """
    if params.hop_limit < 1 or params.settle_limit < 1:
        raise ValueError("hop_limit and settle_limit must be >= 1")
    n = graph.node_count
    forward: list[dict[int, int]] = [dict() for _ in range(n)]
    backward: list[dict[int, int]] = [dict() for _ in range(n)]
    slots: dict[tuple[int, int], tuple[int, int | None]] = {}
    for tail, head, weight in graph.edges():
        forward[tail][head] = weight
        backward[head][tail] = weight
        slots[(tail, head)] = (weight, None)
    level = [-1] * n
    contracted = bytearray(n)
    contracted_neighbours = [0] * n
    hop_limit = params.hop_limit
    settle_limit = params.settle_limit

    def witness_distances(start: int, skip: int, cutoff: int) -> dict[int, int]:
        """Bounded Dijkstra from start avoiding skip; tentative values
        included, every one an upper bound on the true distance."""
        dist = {start: 0}
        hops = {start: 0}
        heap = [(0, start)]
        settled = 0
        while heap:
            d, u = heappop(heap)
            if d > dist[u]:
                continue
            if d > cutoff:
                break
            settled += 1
            if settled > settle_limit:
                break
            hop_u = hops[u]
            if hop_u >= hop_limit:
                continue
            for v, weight in forward[u].items():
                if v == skip:
                    continue
                nd = d + weight
                if nd < dist.get(v, INFINITY):
                    dist[v] = nd
                    hops[v] = hop_u + 1
                    heappush(heap, (nd, v))
        return dist

    def shortcuts_for(node: int) -> list[tuple[int, int, int]]:
        outs = list(forward[node].items())
        if not outs or not backward[node]:
            return []
        max_out = max(weight for _, weight in outs)
        needed = []
        for tail, weight_in in backward[node].items():
            reach = witness_distances(tail, node, weight_in + max_out)
            for head, weight_out in outs:
                if head == tail:
                    continue
                cost = weight_in + weight_out
                if reach.get(head, INFINITY) <= cost:
                    continue  # a witness (or an equal existing edge) survives without `node`
                needed.append((tail, head, cost))
        return needed

    next_level = 0

    def contract(node: int, needed: list[tuple[int, int, int]]) -> None:
        nonlocal next_level
        for tail, head, cost in needed:
            old = forward[tail].get(head)
            if old is None or cost < old:
                forward[tail][head] = cost
                backward[head][tail] = cost
                slots[(tail, head)] = (cost, node)
        neighbours = set(backward[node]) | set(forward[node])
        for tail in backward[node]:
            del forward[tail][node]
        for head in forward[node]:
            del backward[head][node]
        forward[node].clear()
        backward[node].clear()
        for other in neighbours:
            contracted_neighbours[other] += 1
        contracted[node] = 1
        level[node] = next_level
        next_level += 1

    if params.node_order is not None:
        if sorted(params.node_order) != list(range(n)):
            raise ValueError("node_order must be a permutation of all nodes")
        for node in params.node_order:
            contract(node, shortcuts_for(node))
    else:
        def priority(node: int, needed: list[tuple[int, int, int]]) -> int:
            removed = len(forward[node]) + len(backward[node])
            return len(needed) - removed + contracted_neighbours[node]

        queue = [(priority(node, shortcuts_for(node)), node) for node in range(n)]
        heapify(queue)
        while queue:
            _stale, node = heappop(queue)
            if contracted[node]:
                continue
            needed = shortcuts_for(node)
            current = priority(node, needed)
            if queue and current > queue[0][0]:
                heappush(queue, (current, node))
                continue
            contract(node, needed)

    return Hierarchy(n, tuple(level), slots)


def _upward_search(adjacency, start: int) -> tuple[dict[int, int], dict[int, int]]:
    dist = {start: 0}
    parent: dict[int, int] = {}
    heap = [(0, start)]
    while heap:
        d, u = heappop(heap)
        if d > dist[u]:
            continue
        for v, weight in adjacency[u]:
            nd = d + weight
            known = dist.get(v)
            if known is None or nd < known:
                dist[v] = nd
                parent[v] = u
                heappush(heap, (nd, v))
    return dist, parent


def ch_query(hierarchy: Hierarchy, source: int, target: int) -> ChQueryResult:
    """Exact distance via two upward searches meeting at a top node."""
    if not (0 <= source < hierarchy.node_count and 0 <= target < hierarchy.node_count):
        raise ValueError("query endpoints outside the node range")
    if source == target:
        return ChQueryResult(0, ChPath(()))
    dist_fwd, parent_fwd = _upward_search(hierarchy._up_out, source)
    dist_bwd, parent_bwd = _upward_search(hierarchy._down_into, target)
    best: int | float = INFINITY
    meet = -1
    for node, df in dist_fwd.items():
        db = dist_bwd.get(node)
        if db is None:
            continue
        total = df + db
        if total < best or (total == best and node < meet):
            best = total
            meet = node
    if meet < 0:
        return ChQueryResult(INFINITY, None)
    pairs: list[tuple[int, int]] = []
    node = meet
    while node != source:
        previous = parent_fwd[node]
        pairs.append((previous, node))
        node = previous
    pairs.reverse()
    node = meet
    while node != target:
        following = parent_bwd[node]
        pairs.append((node, following))
        node = following
    edges = tuple(ChEdge(tail, head, hierarchy.is_shortcut(tail, head)) for tail, head in pairs)
    return ChQueryResult(best, ChPath(edges))


def compress_with_ch(hierarchy: Hierarchy, path: Path | ChPath) -> ChPath:
    """Replace edge pairs by their recorded shortcuts, bottom level first.

    A pair collapses only when the hierarchy holds a shortcut whose
    middle is exactly the node between them and whose two constituents
    are exactly the pair's current edges, so unpacking the result always
    reproduces the input. Running it again on its own output changes
    nothing. Plain paths are treated as all-original hierarchy edges.
    """
    if isinstance(path, Path):
        edges = [ChEdge(tail, head, False) for tail, head in path.edges]
    else:
        edges = list(path.edges)
    if len(edges) <= 1:
        return ChPath(tuple(edges))
    nodes = [edges[0].tail] + [e.head for e in edges]
    last = len(nodes) - 1
    nxt = list(range(1, len(nodes) + 1))
    prv = list(range(-1, len(nodes) - 1))
    is_shortcut = [e.shortcut for e in edges] + [False]
    level = hierarchy.level
    records = hierarchy._edges
    interior = sorted(range(1, last), key=lambda pos: (level[nodes[pos]], pos))
    for pos in interior:
        before, after = prv[pos], nxt[pos]
        tail, mid, head = nodes[before], nodes[pos], nodes[after]
        record = records.get((tail, head))
        if record is None or record[1] != mid:
            continue
        left_kind = records[(tail, mid)][1] is not None
        right_kind = records[(mid, head)][1] is not None
        if is_shortcut[before] != left_kind or is_shortcut[pos] != right_kind:
            continue
        nxt[before] = after
        prv[after] = before
        is_shortcut[before] = True
    out = []
    pos = 0
    while pos != last:
        following = nxt[pos]
        out.append(ChEdge(nodes[pos], nodes[following], is_shortcut[pos]))
        pos = following
    return ChPath(tuple(out))


def unpack(hierarchy: Hierarchy, path: ChPath) -> Path:
    """Expand every shortcut down to original edges."""
    out: list[tuple[int, int]] = []
    stack = list(path.edges)
    stack.reverse()
    records = hierarchy._edges
    while stack:
        edge = stack.pop()
        if not edge.shortcut:
            out.append((edge.tail, edge.head))
            continue
        record = records.get((edge.tail, edge.head))
        if record is None or record[1] is None:
            raise ValueError(f"unknown shortcut ({edge.tail}, {edge.head})")
        middle = record[1]
        left_kind = records[(edge.tail, middle)][1] is not None
        right_kind = records[(middle, edge.head)][1] is not None
        stack.append(ChEdge(middle, edge.head, right_kind))
        stack.append(ChEdge(edge.tail, middle, left_kind))
    return Path(tuple(out))


@dataclass(frozen=True)
class CombinedRepr:
    """Via edges taken over a hierarchy-compressed route; vias may be
    shortcuts, gaps are validated against the original graph."""

    source: int
    target: int
    vias: tuple[ChEdge, ...]


def _search_costs(hierarchy: Hierarchy, graph: Graph, edges: list[ChEdge]) -> list[int]:
    # Shortcut weights equal their unpacked cost, so these prefix sums
    # price the underlying original route. Original-tagged edges price by
    # the graph: a cheaper parallel shortcut may own the hierarchy slot.
    costs = [0]
    for edge in edges:
        if edge.shortcut:
            weight = hierarchy.weight(edge.tail, edge.head)
        else:
            weight = graph.weight(edge.tail, edge.head)
        if weight is None:
            raise ValueError(f"edge ({edge.tail}, {edge.head}) unknown to the graph or hierarchy")
        costs.append(costs[-1] + weight)
    return costs


def compress_combined(hierarchy: Hierarchy, engine: ShortestPathEngine, path: Path) -> CombinedRepr:
    """Hierarchy compression first, then via edges over the result.

    The uniqueness oracle runs in the original graph between the unpacked
    endpoints of each candidate gap, so a gap qualifies exactly when its
    unpacked form is the unique shortest path there.
    """
    _require_route(engine.graph, path)
    compressed = compress_with_ch(hierarchy, path)
    edges = list(compressed.edges)
    nodes = [edges[0].tail] + [e.head for e in edges]
    prefix_cost = _search_costs(hierarchy, engine.graph, edges)
    check = _checker(engine, nodes, prefix_cost)
    positions = _scan_prefix(check, len(edges), _prefix_gallop)
    return CombinedRepr(nodes[0], nodes[-1], tuple(edges[p] for p in positions))


def decompress_combined(hierarchy: Hierarchy, engine: ShortestPathEngine, repr_: CombinedRepr) -> Path:
    """Stitch original-graph unique shortest gaps around unpacked vias."""
    graph = engine.graph
    out: list[tuple[int, int]] = []
    current = repr_.source
    for via in repr_.vias:
        if current != via.tail:
            result = engine.query(current, via.tail)
            if result.multiplicity != 1:
                raise IntegrityError(f"gap {current}->{via.tail} is not a unique shortest path")
            out.extend(result.witness.edges)
        if via.shortcut:
            try:
                segment = unpack(hierarchy, ChPath((via,)))
            except ValueError as exc:
                raise IntegrityError(str(exc)) from exc
            out.extend(segment.edges)
        else:
            if graph.weight(via.tail, via.head) is None:
                raise IntegrityError(f"via edge ({via.tail}, {via.head}) is not in the graph")
            out.append((via.tail, via.head))
        current = via.head
    if current != repr_.target:
        result = engine.query(current, repr_.target)
        if result.multiplicity != 1:
            raise IntegrityError(f"gap {current}->{repr_.target} is not a unique shortest path")
        out.extend(result.witness.edges)
    return Path(tuple(out))


_MAGIC = b"CHR1"
_HEADER = struct.Struct("<II")
_EDGE = struct.Struct("<IIQB")
_U32 = struct.Struct("<I")


def save(hierarchy: Hierarchy) -> bytes:
    """Serialize to the .chr layout described in the module docstring."""
    buf = bytearray(_MAGIC)
    buf += _HEADER.pack(hierarchy.node_count, hierarchy.edge_count)
    buf += struct.pack(f"<{hierarchy.node_count}I", *hierarchy.level)
    middles = []
    for tail, head, weight, middle in hierarchy.edges():
        flags = 0
        if middle is not None:
            flags |= 1
            middles.append(middle)
        if hierarchy.level[tail] < hierarchy.level[head]:
            flags |= 2
        buf += _EDGE.pack(tail, head, weight, flags)
    for middle in middles:
        buf += _U32.pack(middle)
    return bytes(buf)


def load(data: bytes) -> Hierarchy:
    """Parse and fully validate a .chr byte string."""
    view = memoryview(data)
    offset = 0

    def take(size: int) -> memoryview:
        nonlocal offset
        if offset + size > len(view):
            raise HierarchyFormatError("truncated stream")
        chunk = view[offset:offset + size]
        offset += size
        return chunk

    if bytes(take(4)) != _MAGIC:
        raise HierarchyFormatError("bad magic")
    node_count, edge_count = _HEADER.unpack(take(_HEADER.size))
    level_raw = take(4 * node_count)
    level = tuple(struct.unpack(f"<{node_count}I", level_raw)) if node_count else ()
    if sorted(level) != list(range(node_count)):
        raise HierarchyFormatError("level array is not a contraction order")
    records: list[tuple[int, int, int, int]] = []
    shortcut_total = 0
    for _ in range(edge_count):
        tail, head, weight, flags = _EDGE.unpack(take(_EDGE.size))
        if tail >= node_count or head >= node_count:
            raise HierarchyFormatError(f"edge ({tail}, {head}) outside the node range")
        if tail == head:
            raise HierarchyFormatError(f"self-loop at node {tail}")
        if weight < 1:
            raise HierarchyFormatError(f"edge ({tail}, {head}) has non-positive weight")
        if flags & ~3:
            raise HierarchyFormatError(f"edge ({tail}, {head}) has unknown flag bits")
        upward = level[tail] < level[head]
        if bool(flags & 2) != upward:
            raise HierarchyFormatError(f"edge ({tail}, {head}) has a wrong direction flag")
        if flags & 1:
            shortcut_total += 1
        records.append((tail, head, weight, flags))
    middles = []
    for _ in range(shortcut_total):
        middles.append(_U32.unpack(take(_U32.size))[0])
    if offset != len(view):
        raise HierarchyFormatError("trailing bytes after the middle table")
    edges: dict[tuple[int, int], tuple[int, int | None]] = {}
    middle_iter = iter(middles)
    previous_key: tuple[int, int] | None = None
    for tail, head, weight, flags in records:
        key = (tail, head)
        if previous_key is not None and key <= previous_key:
            raise HierarchyFormatError("edge records out of order or duplicated")
        previous_key = key
        middle = next(middle_iter) if flags & 1 else None
        edges[key] = (weight, middle)
    for (tail, head), (weight, middle) in edges.items():
        if middle is None:
            continue
        if middle >= node_count:
            raise HierarchyFormatError(f"middle {middle} outside the node range")
        if not (level[middle] < level[tail] and level[middle] < level[head]):
            raise HierarchyFormatError(f"shortcut ({tail}, {head}) has a middle above its endpoints")
        left = edges.get((tail, middle))
        right = edges.get((middle, head))
        if left is None or right is None:
            raise HierarchyFormatError(f"shortcut ({tail}, {head}) is missing a constituent edge")
        if left[0] + right[0] != weight:
            raise HierarchyFormatError(f"shortcut ({tail}, {head}) weight differs from its constituents")
    return Hierarchy(node_count, level, edges)
