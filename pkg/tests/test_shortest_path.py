import itertools
import threading
from random import Random

import pytest

from routezip import Graph, INFINITY, Path, ShortestPathEngine, SpResult, path_cost, validate_path

from .oracles import bellman_ford, brute_tables, random_graph


class TestBasicQueries:
    def test_tied_routes_report_multiplicity_two(self, diamond):
        result = ShortestPathEngine(diamond).query(0, 3)
        assert result.distance == 2
        assert result.multiplicity == 2
        assert len(result.witness) == 2
        assert validate_path(diamond, result.witness) is None

    def test_unique_route_reports_multiplicity_one(self, chain5):
        result = ShortestPathEngine(chain5).query(0, 4)
        assert result == SpResult(4, 1, Path(((0, 1), (1, 2), (2, 3), (3, 4))))

    def test_unreachable_target(self, chain5):
        assert ShortestPathEngine(chain5).query(4, 0) == SpResult(INFINITY, 0, None)

    def test_source_equals_target(self, diamond):
        assert ShortestPathEngine(diamond).query(2, 2) == SpResult(0, 1, Path(()))

    def test_multiplicity_saturates_at_two(self):
        fan = Graph(5, [(0, k, 1) for k in (1, 2, 3)] + [(k, 4, 1) for k in (1, 2, 3)])
        result = ShortestPathEngine(fan).query(0, 4)
        assert result.distance == 2
        assert result.multiplicity == 2

    def test_rejects_nodes_outside_range(self, diamond):
        engine = ShortestPathEngine(diamond)
        with pytest.raises(ValueError):
            engine.query(0, 4)
        with pytest.raises(ValueError):
            engine.unique_shortest(-1, 0, 1)

    def test_rejects_non_positive_cache(self, diamond):
        with pytest.raises(ValueError):
            ShortestPathEngine(diamond, cache_size=0)


class TestUniquenessChecks:
    def test_unique_shortest_needs_matching_cost(self, chain5):
        engine = ShortestPathEngine(chain5)
        assert engine.unique_shortest(0, 2, 2)
        assert not engine.unique_shortest(0, 2, 3)

    def test_unique_shortest_false_on_tie_or_unreachable(self, diamond):
        engine = ShortestPathEngine(diamond)
        assert not engine.unique_shortest(0, 3, 2)
        assert not engine.unique_shortest(3, 0, 1)

    def test_is_unique_sp_checks_the_given_route(self, diamond):
        engine = ShortestPathEngine(diamond)
        assert engine.is_unique_sp(Path(((0, 1),)))
        assert not engine.is_unique_sp(Path(((0, 1), (1, 3))))

    def test_is_unique_sp_rejects_empty_path(self, diamond):
        with pytest.raises(ValueError):
            ShortestPathEngine(diamond).is_unique_sp(Path(()))

    def test_non_shortest_route_is_not_unique(self):
        g = Graph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
        engine = ShortestPathEngine(g)
        assert not engine.is_unique_sp(Path(((0, 1), (1, 2))))


class TestAgainstBruteForce:
    def test_every_three_node_graph(self):
        """Sweep all 3^6 = 729 graphs where each ordered pair carries
        weight 1, weight 2, or no edge at all."""
        pairs = [(t, h) for t in range(3) for h in range(3) if t != h]
        for choice in itertools.product((0, 1, 2), repeat=6):
            edges = [(t, h, w) for (t, h), w in zip(pairs, choice) if w]
            graph = Graph(3, edges)
            dist, mult = brute_tables(graph)
            engine = ShortestPathEngine(graph)
            for s in range(3):
                for t in range(3):
                    result = engine.query(s, t)
                    assert result.distance == dist[s][t], (edges, s, t)
                    assert result.multiplicity == min(mult[s][t], 2), (edges, s, t)
                    if result.witness is None:
                        assert result.multiplicity == 0
                    else:
                        assert validate_path(graph, result.witness) is None
                        assert (result.witness.source if result.witness.edges else s) == s
                        assert (result.witness.target if result.witness.edges else t) == t
                        assert path_cost(graph, result.witness) == result.distance
                    expected_unique = mult[s][t] == 1 and dist[s][t] != INFINITY
                    assert engine.unique_shortest(s, t, dist[s][t] if dist[s][t] != INFINITY else 0) \
                        == expected_unique

    def test_random_graphs_match_relaxation_distances(self):
        rng = Random(20240817)
        for _ in range(100):
            n = rng.randint(2, 30)
            m = rng.randint(1, min(4 * n, n * (n - 1)))
            graph = random_graph(rng, n, m, max_weight=50)
            engine = ShortestPathEngine(graph)
            for source in rng.sample(range(n), min(3, n)):
                expected = bellman_ford(graph, source)
                for target in range(n):
                    assert engine.query(source, target).distance == expected[target]

    def test_witnesses_on_random_graphs_are_shortest(self):
        rng = Random(99)
        for _ in range(30):
            graph = random_graph(rng, 12, 40)
            engine = ShortestPathEngine(graph)
            expected = {s: bellman_ford(graph, s) for s in range(12)}
            for s in range(12):
                for t in range(12):
                    result = engine.query(s, t)
                    if result.witness is not None:
                        assert path_cost(graph, result.witness) == expected[s][t]


class TestResumability:
    def test_later_query_from_same_source_matches_fresh_engine(self, chain5):
        shared = ShortestPathEngine(chain5)
        assert shared.query(0, 1).distance == 1
        resumed = shared.query(0, 4)
        fresh = ShortestPathEngine(chain5).query(0, 4)
        assert resumed == fresh

    def test_routes_through_an_early_target_survive_resume(self):
        # 0 -> 1 -> 2: settling target 1 first must still relax its edges.
        g = Graph(3, [(0, 1, 1), (1, 2, 1)])
        engine = ShortestPathEngine(g)
        assert engine.query(0, 1).distance == 1
        assert engine.query(0, 2) == SpResult(2, 1, Path(((0, 1), (1, 2))))

    def test_cache_eviction_keeps_answers_correct(self):
        rng = Random(7)
        graph = random_graph(rng, 15, 60)
        small = ShortestPathEngine(graph, cache_size=2)
        fresh = ShortestPathEngine(graph)
        queries = [(rng.randrange(15), rng.randrange(15)) for _ in range(80)]
        for s, t in queries:
            assert small.query(s, t) == fresh.query(s, t)

    def test_witness_is_deterministic(self):
        rng = Random(3)
        graph = random_graph(rng, 10, 35, max_weight=3)
        first = ShortestPathEngine(graph)
        second = ShortestPathEngine(graph)
        for s in range(10):
            for t in range(10):
                a = first.query(s, t)
                assert a == second.query(s, t)
                assert a == first.query(s, t)


class TestCounter:
    def test_counts_queries_and_uniqueness_checks(self, diamond):
        engine = ShortestPathEngine(diamond)
        assert engine.query_counter() == 0
        engine.query(0, 3)
        engine.query(0, 3)
        engine.unique_shortest(0, 1, 1)
        assert engine.query_counter() == 3
        engine.reset_query_counter()
        assert engine.query_counter() == 0

    def test_is_unique_sp_counts_one_query(self, chain5):
        engine = ShortestPathEngine(chain5)
        engine.is_unique_sp(Path(((0, 1), (1, 2))))
        assert engine.query_counter() == 1

    def test_cached_repeats_still_count(self, chain5):
        engine = ShortestPathEngine(chain5)
        for _ in range(5):
            engine.query(0, 4)
        assert engine.query_counter() == 5


class TestThreadSharing:
    def test_concurrent_queries_agree_with_serial_results(self):
        rng = Random(11)
        graph = random_graph(rng, 20, 90)
        reference = ShortestPathEngine(graph)
        cases = [(rng.randrange(20), rng.randrange(20)) for _ in range(200)]
        expected = [reference.query(s, t) for s, t in cases]
        shared = ShortestPathEngine(graph)
        failures: list[tuple[int, SpResult, SpResult]] = []

        def worker(offset: int) -> None:
            for index in range(offset, len(cases), 4):
                s, t = cases[index]
                got = shared.query(s, t)
                if got != expected[index]:
                    failures.append((index, got, expected[index]))

        threads = [threading.Thread(target=worker, args=(k,)) for k in range(4)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()
        assert failures == []
