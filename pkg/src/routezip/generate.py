"""Deterministic generators for benchmark graphs and routes.

Everything takes an explicit random.Random so a seed pins the output
exactly; nothing touches the global generator state.
"""

from __future__ import annotations

from random import Random

from .graph import Graph, INFINITY, Path
from .shortest_path import ShortestPathEngine


def _weight_source(rng: Random | None, low: int, high: int):
    if not 1 <= low <= high:
        raise ValueError("need 1 <= min_weight <= max_weight")
    if low == high:
        return lambda: low
    if rng is None:
        raise ValueError("random weights need an rng")
    return lambda: rng.randint(low, high)


def grid_graph(
    width: int, height: int, rng: Random | None = None, min_weight: int = 1, max_weight: int = 1
) -> Graph:
    """Bidirected 4-neighbour grid, nodes numbered row by row.

    Each direction of an adjacency gets its own weight, drawn uniformly
    from min_weight..max_weight.
    """
    if width < 1 or height < 1:
        raise ValueError("grid dimensions must be positive")
    weight = _weight_source(rng, min_weight, max_weight)
    edges = []
    for y in range(height):
        for x in range(width):
            node = y * width + x
            if x + 1 < width:
                edges.append((node, node + 1, weight()))
                edges.append((node + 1, node, weight()))
            if y + 1 < height:
                edges.append((node, node + width, weight()))
                edges.append((node + width, node, weight()))
    return Graph(width * height, edges)


def chain_graph(
    node_count: int, rng: Random | None = None, min_weight: int = 1, max_weight: int = 1
) -> Graph:
    """One-directional chain 0 -> 1 -> .. -> node_count - 1."""
    if node_count < 1:
        raise ValueError("node_count must be positive")
    weight = _weight_source(rng, min_weight, max_weight)
    return Graph(node_count, [(node, node + 1, weight()) for node in range(node_count - 1)])


def diamond_graph() -> Graph:
    """Four nodes, two equal-cost unit routes from 0 to 3."""
    return Graph(4, [(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1)])


def random_walk_path(graph: Graph, rng: Random, length: int, start: int | None = None) -> Path:
    """Uniform outgoing-edge walk of exactly `length` edges.

    Dead ends restart the walk; sixty failed attempts raise ValueError.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if start is not None and not 0 <= start < graph.node_count:
        raise ValueError("start outside the node range")
    for _ in range(60):
        node = start if start is not None else rng.randrange(graph.node_count)
        edges: list[tuple[int, int]] = []
        while len(edges) < length:
            outs = graph.outgoing[node]
            if not outs:
                break
            head, _weight = rng.choice(outs)
            edges.append((node, head))
            node = head
        if len(edges) == length:
            return Path(tuple(edges))
    raise ValueError("no walk of the requested length found")


def waypoint_tour_path(graph: Graph, engine: ShortestPathEngine, rng: Random, length: int) -> Path:
    """Shortest-path legs between random waypoints, trimmed to `length`.

    Legs are optimal individually, the stitched route usually is not;
    that makes long routes with via counts near the waypoint count.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if engine.graph is not graph:
        raise ValueError("engine must be built on the same graph")
    if graph.node_count < 2:
        raise ValueError("tours need at least two nodes")
    for _ in range(60):
        node = rng.randrange(graph.node_count)
        edges: list[tuple[int, int]] = []
        stuck = 0
        while len(edges) < length and stuck < 40:
            waypoint = rng.randrange(graph.node_count)
            if waypoint == node:
                continue
            result = engine.query(node, waypoint)
            if result.distance == INFINITY:
                stuck += 1
                continue
            edges.extend(result.witness.edges)
            node = waypoint
        if len(edges) >= length:
            return Path(tuple(edges[:length]))
    raise ValueError("no tour of the requested length found")


def perturbed_shortest_path(
    engine: ShortestPathEngine, rng: Random, min_length: int, detours: int = 2
) -> Path:
    """A long shortest path with a few local deviations spliced in.

    Samples node pairs for the longest witness of at least `min_length`
    edges, then up to `detours` times leaves the route for one edge and
    rejoins it by a shortest path to a later node. Detour attempts that
    find no way back are dropped silently.
    """
    if min_length < 1:
        raise ValueError("min_length must be >= 1")
    graph = engine.graph
    best: Path | None = None

    def offer(result) -> None:
        nonlocal best
        if result.witness is not None and (best is None or len(result.witness) > len(best)):
            best = result.witness

    for _ in range(40):
        source = rng.randrange(graph.node_count)
        target = rng.randrange(graph.node_count)
        if source != target:
            offer(engine.query(source, target))
        if best is not None and len(best) >= min_length:
            break
    if (best is None or len(best) < min_length) and graph.node_count <= 64:
        # Sampling misses rare long pairs on tiny graphs; scan them all.
        for source in range(graph.node_count):
            for target in range(graph.node_count):
                if source != target:
                    offer(engine.query(source, target))
    if best is None or len(best) < min_length:
        raise ValueError("no witness of the requested length found")
    edges = list(best.edges)
    for _ in range(detours):
        if len(edges) < 2:
            break
        position = rng.randrange(len(edges) - 1)
        node = edges[position][0]
        outs = [head for head, _w in graph.outgoing[node] if head != edges[position][1]]
        if not outs:
            continue
        leave = rng.choice(outs)
        rejoin_position = rng.randrange(position + 1, len(edges))
        rejoin = edges[rejoin_position][1]
        if leave == rejoin:
            back = Path(())
        else:
            result = engine.query(leave, rejoin)
            if result.witness is None:
                continue
            back = result.witness
        edges = (
            edges[:position]
            + [(node, leave)]
            + list(back.edges)
            + edges[rejoin_position + 1:]
        )
    return Path(tuple(edges))
