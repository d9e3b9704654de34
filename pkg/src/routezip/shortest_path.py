"""One-to-one shortest path queries with exact multiplicity tracking.

The engine runs Dijkstra with a per-node count of distinct shortest
paths, saturated at 2: a strictly shorter relaxation resets the count to
the predecessor's, an equal-cost relaxation adds it in. All weights are
positive, so every predecessor of a node along a shortest path settles
strictly earlier; once a node settles, its distance, count, and parent
link are final. That makes the search resumable: repeated queries from
the same source reuse one partially-run search, which keeps prefix scans
cheap, while each call still counts as one query.
"""

from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass
from heapq import heappush, heappop

from .graph import Graph, INFINITY, Path, path_cost


@dataclass(frozen=True)
class SpResult:
    """Outcome of a query: distance, path count capped at 2, and a witness.

    multiplicity is 0 exactly when the target is unreachable (distance
    INFINITY, witness None); otherwise the witness is a shortest path and
    is the unique one whenever multiplicity == 1.
    """

    distance: int | float
    multiplicity: int
    witness: Path | None


class _Search:
    """Resumable single-source Dijkstra state."""

    __slots__ = ("dist", "count", "parent", "settled", "heap")

    def __init__(self, node_count: int, source: int):
        self.dist: list[int | float] = [INFINITY] * node_count
        self.count = [0] * node_count
        self.parent = [-1] * node_count
        self.settled = bytearray(node_count)
        self.heap: list[tuple[int | float, int]] = [(0, source)]
        self.dist[source] = 0
        self.count[source] = 1


class ShortestPathEngine:
    """Query interface over one graph, with an instrumentation counter.

    The counter tallies every query issued (query() and the uniqueness
    checks); reset it before a measurement and read it after. Calls are
    serialized by an internal lock, so one engine may be shared between
    threads, though separate engines per worker parallelize better.
    """

    def __init__(self, graph: Graph, cache_size: int = 32):
        if cache_size < 1:
            raise ValueError("cache_size must be >= 1")
        self.graph = graph
        self._adjacency = graph.outgoing
        self._cache_size = cache_size
        self._searches: OrderedDict[int, _Search] = OrderedDict()
        self._queries = 0
        self._lock = threading.Lock()

    def query_counter(self) -> int:
        return self._queries

    def reset_query_counter(self) -> None:
        with self._lock:
            self._queries = 0

    def query(self, source: int, target: int) -> SpResult:
        """Distance, multiplicity, and a deterministic witness path."""
        self._check_node(source)
        self._check_node(target)
        with self._lock:
            self._queries += 1
            search = self._search_from(source)
            self._advance(search, target)
            if not search.settled[target]:
                return SpResult(INFINITY, 0, None)
            reversed_edges = []
            node = target
            parent = search.parent
            while node != source:
                previous = parent[node]
                reversed_edges.append((previous, node))
                node = previous
            reversed_edges.reverse()
            return SpResult(search.dist[target], search.count[target], Path(tuple(reversed_edges)))

    def unique_shortest(self, source: int, target: int, cost: int) -> bool:
        """Is there exactly one shortest path source->target, of this cost?

        Counted as one query. This is the primitive behind is_unique_sp;
        it skips witness construction, which the comparison never needs.
        """
        self._check_node(source)
        self._check_node(target)
        with self._lock:
            self._queries += 1
            search = self._search_from(source)
            self._advance(search, target)
            if not search.settled[target]:
                return False
            return search.count[target] == 1 and search.dist[target] == cost

    def is_unique_sp(self, path: Path) -> bool:
        """True iff the non-empty path is the one and only shortest route
        between its endpoints."""
        if not path.edges:
            raise ValueError("uniqueness is undefined for the empty path")
        cost = path_cost(self.graph, path)
        return self.unique_shortest(path.source, path.target, cost)

    def _check_node(self, node: int) -> None:
        if not (0 <= node < self.graph.node_count):
            raise ValueError(f"node {node} outside 0..{self.graph.node_count - 1}")

    def _search_from(self, source: int) -> _Search:
        search = self._searches.get(source)
        if search is None:
            search = _Search(self.graph.node_count, source)
            self._searches[source] = search
            if len(self._searches) > self._cache_size:
                self._searches.popitem(last=False)
        else:
            self._searches.move_to_end(source)
        return search

    def _advance(self, search: _Search, target: int) -> None:
        """Run the search until target settles or the frontier empties."""
        if search.settled[target]:
            return
        dist = search.dist
        count = search.count
        parent = search.parent
        settled = search.settled
        heap = search.heap
        adjacency = self._adjacency
        while heap:
            d, u = heappop(heap)
            if settled[u]:
                continue
            settled[u] = 1
            # Edges of u must relax even when u is the target, or later
            # resumed queries would miss routes through it.
            count_u = count[u]
            for v, weight in adjacency[u]:
                nd = d + weight
                dv = dist[v]
                if nd < dv:
                    dist[v] = nd
                    count[v] = count_u
                    parent[v] = u
                    heappush(heap, (nd, v))
                elif nd == dv:
                    c = count[v] + count_u
                    count[v] = c if c < 2 else 2
            if u == target:
                return
