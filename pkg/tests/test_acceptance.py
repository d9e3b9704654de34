"""Whole-system acceptance battery.

One test per numbered criterion in the project checklist. The heavy
fixture compresses and decompresses one thousand seeded routes on two
grids through every method, once per session; the criteria then assert
over the recorded outcomes. Each test appends a PASS or FAIL verdict
line, echoed after the run by a conftest hook.
"""

import math
from dataclasses import dataclass, field
from random import Random
from time import perf_counter

import pytest

from routezip import (
    INFINITY,
    Graph,
    Path,
    ShortestPathEngine,
    build_hierarchy,
    ch_path_from_message,
    ch_query,
    combined_from_message,
    compress_combined,
    compress_with_ch,
    CodecError,
    decode,
    decompress_combined,
    decompress_via_edges,
    decompress_via_nodes,
    encode,
    grid_graph,
    lift_path,
    message_from_ch_path,
    message_from_combined,
    message_from_via_edges,
    message_from_via_nodes,
    perturbed_shortest_path,
    project_path,
    random_walk_path,
    split_non_unique_edges,
    unpack,
    via_edges_binary,
    via_edges_from_message,
    via_edges_gallop,
    via_edges_linear,
    via_nodes,
    via_nodes_from_message,
    waypoint_tour_path,
)

from .conftest import acceptance_report
from .oracles import brute_tables, min_via_count, random_graph
from .test_wire import GOLDEN_DIR, random_message
from .test_wire import TestGoldenFiles as _WireGoldens

METHODS = ("via-linear", "via-binary", "via-gallop", "via-nodes", "ch", "combined")


def verdict(number: int, label: str, ok: bool, detail: str) -> None:
    state = "PASS" if ok else "FAIL"
    acceptance_report.append(f"criterion {number:2d} {label}: {state} ({detail})")
    assert ok, f"criterion {number} {label}: {detail}"


@dataclass
class Workbench:
    graph: Graph
    engine: ShortestPathEngine
    hierarchy: object
    mapping: object
    split_engine: ShortestPathEngine


@dataclass
class Outcome:
    grid: str
    kind: str
    path_len: int
    via_len: int = -1
    p_prime_len: int = -1
    counts: tuple[int, int, int] = (0, 0, 0)
    agree: bool = False
    fixed_point: bool = False
    failures: list[str] = field(default_factory=list)


@pytest.fixture(scope="session")
def benches() -> dict[str, Workbench]:
    out = {}
    for key, (width, seed, top) in {"g20": (20, 101, 8), "g50": (50, 202, 1000)}.items():
        graph = grid_graph(width, width, Random(seed), 1, top)
        split_graph, mapping = split_non_unique_edges(graph)
        out[key] = Workbench(
            graph=graph,
            engine=ShortestPathEngine(graph),
            hierarchy=build_hierarchy(graph),
            mapping=mapping,
            split_engine=ShortestPathEngine(split_graph),
        )
    return out


def seeded_instances(benches) -> list[tuple[str, str, Path]]:
    """One thousand routes across both grids, lengths covering 1..500."""
    instances = []
    rng = Random(404)
    g20 = benches["g20"]
    for i in range(240):
        instances.append(("g20", "walk", random_walk_path(g20.graph, rng, 1 + (499 * i) // 239)))
    for i in range(160):
        instances.append(("g20", "tour", waypoint_tour_path(g20.graph, g20.engine, rng, 2 + (498 * i) // 159)))
    for i in range(100):
        instances.append(("g20", "sp", perturbed_shortest_path(g20.engine, rng, 4 + i % 17, detours=i % 5)))
    rng = Random(606)
    g50 = benches["g50"]
    for _ in range(100):
        instances.append(("g50", "tour500", waypoint_tour_path(g50.graph, g50.engine, rng, 500)))
    for i in range(240):
        instances.append(("g50", "walk", random_walk_path(g50.graph, rng, 1 + (498 * i) // 239)))
    for i in range(60):
        instances.append(("g50", "tour", waypoint_tour_path(g50.graph, g50.engine, rng, 10 + (480 * i) // 59)))
    for i in range(100):
        instances.append(("g50", "sp", perturbed_shortest_path(g50.engine, rng, 10 + i % 41, detours=i % 4)))
    return instances


def run_all_methods(bench: Workbench, path: Path, outcome: Outcome) -> None:
    engine = bench.engine
    hierarchy = bench.hierarchy
    failures = outcome.failures

    engine.reset_query_counter()
    linear = via_edges_linear(engine, path)
    linear_count = engine.query_counter()
    engine.reset_query_counter()
    binary = via_edges_binary(engine, path)
    binary_count = engine.query_counter()
    engine.reset_query_counter()
    gallop = via_edges_gallop(engine, path)
    gallop_count = engine.query_counter()
    outcome.counts = (linear_count, binary_count, gallop_count)
    outcome.agree = linear == binary == gallop
    outcome.via_len = len(linear.vias)

    wire = via_edges_from_message(decode(encode(message_from_via_edges(1, linear))))
    if decompress_via_edges(engine, wire) != path:
        failures.append("via-edges roundtrip")

    lifted = lift_path(bench.mapping, path)
    noded = via_nodes(bench.split_engine, lifted)
    wire = via_nodes_from_message(decode(encode(message_from_via_nodes(1, noded))))
    if project_path(bench.mapping, decompress_via_nodes(bench.split_engine, wire)) != path:
        failures.append("via-nodes roundtrip")

    compressed = compress_with_ch(hierarchy, path)
    outcome.p_prime_len = len(compressed)
    outcome.fixed_point = compress_with_ch(hierarchy, compressed) == compressed
    message = message_from_ch_path(1, path.source, path.target, compressed)
    _, _, wire = ch_path_from_message(decode(encode(message)))
    if unpack(hierarchy, wire) != path:
        failures.append("ch roundtrip")

    combined = compress_combined(hierarchy, engine, path)
    wire = combined_from_message(decode(encode(message_from_combined(1, combined))))
    if decompress_combined(hierarchy, engine, wire) != path:
        failures.append("combined roundtrip")


@pytest.fixture(scope="session")
def battery(benches):
    instances = seeded_instances(benches)
    outcomes = []
    started = perf_counter()
    for key, kind, path in instances:
        outcome = Outcome(grid=key, kind=kind, path_len=len(path))
        try:
            run_all_methods(benches[key], path, outcome)
        except Exception as exc:
            outcome.failures.append(f"unexpected {exc!r}")
        outcomes.append(outcome)
    return {"outcomes": outcomes, "elapsed": perf_counter() - started}


class TestCriteria:
    def test_1_roundtrip_exactness(self, battery):
        outcomes = battery["outcomes"]
        elapsed = battery["elapsed"]
        broken = [(i, o.failures) for i, o in enumerate(outcomes) if o.failures]
        lengths = {o.path_len for o in outcomes}
        grids = {o.grid for o in outcomes}
        ok = (
            not broken
            and len(outcomes) == 1000
            and grids == {"g20", "g50"}
            and min(lengths) == 1
            and max(lengths) == 500
            and elapsed < 60.0
        )
        verdict(
            1, "roundtrip exactness, six methods", ok,
            f"{len(outcomes)} routes, {len(broken)} failures, {elapsed:.1f}s" +
            (f", first: {broken[0]}" if broken else ""),
        )

    def test_2_size_bounds(self, battery):
        outcomes = battery["outcomes"]
        oversize = [
            o for o in outcomes
            if o.via_len > o.path_len or o.p_prime_len > o.path_len or o.via_len < 0
        ]
        verdict(
            2, "via and hierarchy size bounds", not oversize,
            f"checked {len(outcomes)} routes, {len(oversize)} over the input length",
        )

    def test_3_variant_agreement(self, battery):
        outcomes = battery["outcomes"]
        disagreeing = sum(1 for o in outcomes if not o.agree)
        verdict(
            3, "linear, binary, gallop agree", disagreeing == 0,
            f"{len(outcomes)} routes, {disagreeing} disagreements",
        )

    def test_4_via_count_minimality(self):
        rng = Random(1404)
        checked = 0
        mismatches = 0
        for _ in range(200):
            node_count = rng.randrange(4, 9)
            graph = random_graph(rng, node_count, rng.randrange(node_count, 2 * node_count + 1))
            dist, mult = brute_tables(graph)
            engine = ShortestPathEngine(graph)
            adjacency = [[head for head, _ in graph.outgoing[node]] for node in range(node_count)]
            stack = [(node, (node,)) for node in range(node_count)]
            while stack:
                node, seen = stack.pop()
                for head in adjacency[node]:
                    if head in seen:
                        continue
                    route = seen + (head,)
                    path = Path.from_nodes(route)
                    produced = len(via_edges_linear(engine, path).vias)
                    if produced != min_via_count(graph, path, dist, mult):
                        mismatches += 1
                    checked += 1
                    stack.append((head, route))
        verdict(
            4, "via count equals brute-force minimum", mismatches == 0 and checked > 5000,
            f"{checked} simple paths over 200 graphs, {mismatches} mismatches",
        )

    def test_5_multiplicity_oracle(self):
        rng = Random(1505)
        pairs = 0
        mismatches = 0
        for _ in range(500):
            node_count = rng.randrange(3, 11)
            graph = random_graph(rng, node_count, rng.randrange(node_count, 3 * node_count))
            dist, mult = brute_tables(graph)
            engine = ShortestPathEngine(graph)
            for source in range(node_count):
                for target in range(node_count):
                    result = engine.query(source, target)
                    expected = min(mult[source][target], 2)
                    if result.distance != dist[source][target] or result.multiplicity != expected:
                        mismatches += 1
                    pairs += 1
        verdict(
            5, "multiplicity matches brute counting", mismatches == 0,
            f"{pairs} pairs over 500 graphs, {mismatches} mismatches",
        )

    def test_6_query_count_bounds(self, battery):
        tours = [o for o in battery["outcomes"] if o.kind == "tour500"]
        violations = []
        sharper = []
        for o in tours:
            linear_count, binary_count, gallop_count = o.counts
            q = o.via_len
            binary_bound = 2 * (q + 1) * (math.ceil(math.log2(o.path_len)) + 1)
            gallop_bound = 4 * (q + 1) * (math.ceil(math.log2(o.path_len / max(q, 1))) + 2)
            if linear_count != o.path_len:
                violations.append(f"linear {linear_count} != {o.path_len}")
            if binary_count > binary_bound:
                violations.append(f"binary {binary_count} > {binary_bound}")
            if gallop_count > gallop_bound:
                violations.append(f"gallop {gallop_count} > {gallop_bound}")
            if q <= 10 and o.path_len >= 300:
                sharper.append(gallop_count < linear_count)
        ok = (
            len(tours) == 100
            and all(o.path_len == 500 for o in tours)
            and not violations
            and sharper
            and all(sharper)
        )
        verdict(
            6, "query-count bounds on 500-edge routes", ok,
            f"{len(tours)} tours, {len(violations)} bound violations, "
            f"{len(sharper)} sparse routes all gallop<linear={all(sharper) if sharper else False}",
        )

    def test_7_distance_preservation(self, benches):
        mismatches = 0
        pairs = 0
        for bench in benches.values():
            node_count = bench.graph.node_count
            rng = Random(707)
            for _ in range(50):
                source = rng.randrange(node_count)
                for _ in range(20):
                    target = rng.randrange(node_count)
                    if ch_query(bench.hierarchy, source, target).distance != bench.engine.query(source, target).distance:
                        mismatches += 1
                    pairs += 1
        verdict(
            7, "hierarchy distances equal engine distances", mismatches == 0,
            f"{pairs} seeded pairs across both grids, {mismatches} mismatches",
        )

    def test_8_compression_fixed_point(self, battery):
        outcomes = battery["outcomes"]
        moving = sum(1 for o in outcomes if not o.fixed_point)
        verdict(
            8, "hierarchy compression is a fixed point", moving == 0,
            f"{len(outcomes)} routes, {moving} changed on re-compression",
        )

    def test_9_split_postcondition(self):
        graphs = [
            Graph(5, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1)]),
            Graph(4, [(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1)]),
            Graph(4, [(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1), (0, 3, 2)]),
            grid_graph(5, 4),
        ]
        rng = Random(909)
        for node_count in (5, 10, 18, 27, 40, 55, 70, 85, 100):
            for _ in range(2):
                graphs.append(random_graph(rng, node_count, 2 * node_count))
        non_unique = 0
        undoubled = 0
        for graph in graphs:
            split_graph, _mapping = split_non_unique_edges(graph)
            engine = ShortestPathEngine(graph, cache_size=1)
            split_engine = ShortestPathEngine(split_graph, cache_size=1)
            for tail, head, _weight in split_graph.edges():
                if not split_engine.is_unique_sp(Path(((tail, head),))):
                    non_unique += 1
            for source in range(graph.node_count):
                for target in range(graph.node_count):
                    original = engine.query(source, target).distance
                    doubled = split_engine.query(source, target).distance
                    expected = INFINITY if original is INFINITY else 2 * original
                    if doubled != expected:
                        undoubled += 1
        verdict(
            9, "split graph edges are unique shortest paths", non_unique == 0 and undoubled == 0,
            f"{len(graphs)} graphs up to 100 nodes, {non_unique} ambiguous edges, "
            f"{undoubled} distances not doubled",
        )

    def test_10_codec_battery(self):
        golden_ok = True
        for name, (expected_hex, message) in _WireGoldens.CASES.items():
            blob = (GOLDEN_DIR / name).read_bytes()
            if blob != bytes.fromhex(expected_hex) or decode(blob) != message or encode(message) != blob:
                golden_ok = False
        rng = Random(1010)
        identity_failures = 0
        for _ in range(10000):
            message = random_message(rng)
            if decode(encode(message)) != message:
                identity_failures += 1
        crashes = 0
        for _ in range(100000):
            blob = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 40)))
            if rng.random() < 0.3:
                blob = b"RTC1" + blob
            try:
                decode(blob)
            except CodecError:
                pass
            except Exception:
                crashes += 1
        ok = golden_ok and identity_failures == 0 and crashes == 0
        verdict(
            10, "codec goldens, identities, fuzzing", ok,
            f"5 goldens ok={golden_ok}, {identity_failures} identity failures, "
            f"{crashes} fuzz crashes in 100000 inputs",
        )

    def test_11_long_route_query_budget(self):
        # A 700-edge chain where exactly ten spread-out edges are tied
        # by two-hop detours of equal cost, so ten vias are forced.
        positions = [34, 104, 174, 244, 314, 384, 454, 524, 594, 664]
        edges = [(i, i + 1, 2) for i in range(700)]
        for offset, position in enumerate(positions):
            middle = 701 + offset
            edges.append((position, middle, 1))
            edges.append((middle, position + 1, 1))
        graph = Graph(711, edges)
        engine = ShortestPathEngine(graph)
        path = Path.from_nodes(tuple(range(701)))
        engine.reset_query_counter()
        repr_ = via_edges_binary(engine, path)
        measured = engine.query_counter()
        q = len(repr_.vias)
        bound = 2 * (q + 1) * (math.ceil(math.log2(len(path))) + 1)
        ok = (
            q == 10
            and list(repr_.vias) == [(p, p + 1) for p in positions]
            and 52 <= measured <= 208
            and measured <= bound
            and decompress_via_edges(engine, repr_) == path
        )
        verdict(
            11, "ten-via 700-edge route within query budget", ok,
            f"|Q|={q}, measured {measured} queries, window [52, 208], ceiling {bound}",
        )
