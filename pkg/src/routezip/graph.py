"""Directed road graphs with positive integer weights, and edge paths over them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

# Distance sentinel for unreachable targets. Comparisons against finite
# integer costs are exact, and addition saturates, which is all the
# search code relies on.
INFINITY: float = math.inf

# Largest finite cost a path may reach; sums beyond this raise instead of
# silently growing past what the binary formats can hold.
MAX_COST: int = 2**63 - 1

EdgeRef = tuple[int, int]


class CostOverflowError(OverflowError):
    """Summed edge weights exceeded MAX_COST."""


@dataclass(frozen=True)
class PathViolation:
    """First defect found while validating a path against a graph."""

    position: int
    reason: str


@dataclass(frozen=True)
class Path:
    """A route as an ordered tuple of (tail, head) edge references.

    Consecutive edges must chain head to tail. The empty path is the
    neutral element of concat and carries no endpoints of its own.
    """

    edges: tuple[EdgeRef, ...] = ()

    @classmethod
    def from_nodes(cls, nodes: Iterable[int]) -> "Path":
        seq = list(nodes)
        return cls(tuple(zip(seq, seq[1:])))

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[EdgeRef]:
        return iter(self.edges)

    @property
    def source(self) -> int:
        if not self.edges:
            raise ValueError("empty path has no source")
        return self.edges[0][0]

    @property
    def target(self) -> int:
        if not self.edges:
            raise ValueError("empty path has no target")
        return self.edges[-1][1]

    def nodes(self) -> tuple[int, ...]:
        """Node sequence tail, head, head, ...; empty for the empty path."""
        if not self.edges:
            return ()
        return (self.edges[0][0],) + tuple(head for _, head in self.edges)


class Graph:
    """Immutable directed graph over dense 0-based node ids.

    Weights are integers >= 1. Parallel edges collapse to the minimum
    weight at construction and are tallied in ``duplicate_edges``;
    self-loops are rejected outright.
    """

    __slots__ = ("node_count", "duplicate_edges", "outgoing", "incoming", "_weights")

    def __init__(self, node_count: int, edges: Iterable[tuple[int, int, int]] = ()):
        if node_count < 0:
            raise ValueError("node_count must be >= 0")
        weights: dict[EdgeRef, int] = {}
        duplicates = 0
        for tail, head, weight in edges:
            if not (0 <= tail < node_count and 0 <= head < node_count):
                raise ValueError(f"edge ({tail}, {head}) references a node outside 0..{node_count - 1}")
            if tail == head:
                raise ValueError(f"self-loop at node {tail}")
            if weight < 1:
                raise ValueError(f"edge ({tail}, {head}) has non-positive weight {weight}")
            old = weights.get((tail, head))
            if old is None:
                weights[(tail, head)] = weight
            else:
                duplicates += 1
                if weight < old:
                    weights[(tail, head)] = weight
        out_lists: list[list[tuple[int, int]]] = [[] for _ in range(node_count)]
        in_lists: list[list[tuple[int, int]]] = [[] for _ in range(node_count)]
        for (tail, head) in sorted(weights):
            weight = weights[(tail, head)]
            out_lists[tail].append((head, weight))
            in_lists[head].append((tail, weight))
        self.node_count = node_count
        self.duplicate_edges = duplicates
        self.outgoing: tuple[tuple[tuple[int, int], ...], ...] = tuple(tuple(l) for l in out_lists)
        self.incoming: tuple[tuple[tuple[int, int], ...], ...] = tuple(tuple(l) for l in in_lists)
        self._weights = weights

    @property
    def edge_count(self) -> int:
        return len(self._weights)

    def weight(self, tail: int, head: int) -> int | None:
        return self._weights.get((tail, head))

    def has_edge(self, tail: int, head: int) -> bool:
        return (tail, head) in self._weights

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """All edges as (tail, head, weight), sorted by (tail, head)."""
        for tail, neighbours in enumerate(self.outgoing):
            for head, weight in neighbours:
                yield tail, head, weight

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        # The duplicate tally is load metadata, not structure.
        return self.node_count == other.node_count and self._weights == other._weights

    def __hash__(self) -> int:  # pragma: no cover - never used as a key
        return hash((self.node_count, tuple(sorted(self._weights.items()))))

    def __repr__(self) -> str:
        return f"Graph(nodes={self.node_count}, edges={self.edge_count})"


def validate_path(graph: Graph, path: Path) -> PathViolation | None:
    """Return None for a well-formed path, else the first offence found.

    Checks, in order per edge: consecutiveness with the previous edge,
    then membership in the graph.
    """
    previous_head: int | None = None
    for position, (tail, head) in enumerate(path.edges):
        if previous_head is not None and tail != previous_head:
            return PathViolation(position, f"edge starts at {tail} but the previous edge ended at {previous_head}")
        if graph.weight(tail, head) is None:
            return PathViolation(position, f"edge ({tail}, {head}) is not in the graph")
        previous_head = head
    return None


def path_cost(graph: Graph, path: Path) -> int:
    """Sum of edge weights along the path; 0 for the empty path."""
    total = 0
    for position, (tail, head) in enumerate(path.edges):
        weight = graph.weight(tail, head)
        if weight is None:
            raise ValueError(f"edge ({tail}, {head}) at position {position} is not in the graph")
        total += weight
        if total > MAX_COST:
            raise CostOverflowError(f"path cost exceeds {MAX_COST}")
    return total


def concat(left: Path, right: Path) -> Path:
    """Join two paths end to start; the empty path is a two-sided identity."""
    if not left.edges:
        return right
    if not right.edges:
        return left
    if left.target != right.source:
        raise ValueError(f"cannot concatenate: left ends at {left.target}, right starts at {right.source}")
    return Path(left.edges + right.edges)
