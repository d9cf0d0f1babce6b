import math
import random
from itertools import combinations

import pytest

from onionpath.paths import (
    AnalyticalGraph,
    SimplePath,
    betweenness_estimate,
    betweenness_table,
    count_paths,
    kpaths,
    total_walks,
    walks_between,
    walks_closed,
    within_exact_limits,
)

from helpers import brute_force_betweenness, brute_force_paths, matrix_walks, random_graph


def graph_of(ids, edges, weights=None):
    edges = frozenset(tuple(sorted(e)) for e in edges)
    if weights is None:
        weights = {e: 1.0 for e in edges}
    return AnalyticalGraph(frozenset(ids), edges, weights)


class TestAnalyticalGraph:
    def test_rejects_self_edge(self):
        with pytest.raises(ValueError):
            AnalyticalGraph(frozenset({"a"}), frozenset({("a", "a")}))

    def test_rejects_unknown_vertex(self):
        with pytest.raises(ValueError):
            AnalyticalGraph(frozenset({"a"}), frozenset({("a", "b")}))

    def test_rejects_non_canonical_edge(self):
        with pytest.raises(ValueError):
            AnalyticalGraph(frozenset({"a", "b"}), frozenset({("b", "a")}))

    def test_rejects_negative_weight(self):
        with pytest.raises(ValueError):
            graph_of("ab", [("a", "b")], {("a", "b"): -1.0})

    def test_complete_density(self):
        graph = AnalyticalGraph.complete([f"v{i}" for i in range(7)])
        assert len(graph.edges) == 21
        assert graph.density() == 1.0

    def test_path_weight(self):
        graph = graph_of("abc", [("a", "b"), ("b", "c")], {("a", "b"): 3.0, ("b", "c"): 4.5})
        assert graph.path_weight(("a", "b", "c")) == 7.5


class TestSimplePath:
    def test_requires_an_edge(self):
        with pytest.raises(ValueError):
            SimplePath(("a",))

    def test_rejects_revisits(self):
        with pytest.raises(ValueError):
            SimplePath(("a", "b", "a"))

    def test_length_in_edges(self):
        assert SimplePath(("a", "b", "c")).length_in_edges == 2


class TestKpaths:
    def test_triangle_unique_path(self):
        graph = graph_of("abc", [("a", "b"), ("b", "c"), ("a", "c")])
        found = kpaths(graph, "a", "c", 2, 10, random.Random(0))
        assert [p.vertices for p in found] == [("a", "b", "c")]

    def test_disconnected_returns_empty(self):
        graph = graph_of("abcd", [("a", "b"), ("c", "d")])
        assert kpaths(graph, "a", "d", 2, 10, random.Random(0)) == []

    def test_k5_three_edge_paths(self):
        graph = AnalyticalGraph.complete(list("abcde"))
        found = kpaths(graph, "a", "e", 3, 100, random.Random(1))
        assert len(found) == 6
        assert len({p.vertices for p in found}) == 6

    def test_cap_respected_and_deterministic(self):
        graph = AnalyticalGraph.complete([f"v{i}" for i in range(9)])
        first = kpaths(graph, "v0", "v8", 3, 5, random.Random(3))
        second = kpaths(graph, "v0", "v8", 3, 5, random.Random(3))
        assert len(first) == 5
        assert [p.vertices for p in first] == [p.vertices for p in second]

    def test_results_are_valid_paths(self):
        rng = random.Random(7)
        for trial in range(30):
            ids = [f"v{i}" for i in range(8)]
            edges = random_graph(ids, 0.5, rng)
            graph = graph_of(ids, edges)
            length = rng.choice([2, 3, 4])
            for path in kpaths(graph, "v0", "v7", length, 20, rng):
                assert path.length_in_edges == length
                assert path.vertices[0] == "v0" and path.vertices[-1] == "v7"
                assert "v7" not in path.vertices[:-1]
                for pair in zip(path.vertices, path.vertices[1:]):
                    assert tuple(sorted(pair)) in graph.edges

    def test_source_equal_target_rejected(self):
        graph = AnalyticalGraph.complete(list("abc"))
        with pytest.raises(ValueError):
            kpaths(graph, "a", "a", 2, 1, random.Random(0))


class TestCountPaths:
    def test_k4_two_edge(self):
        graph = AnalyticalGraph.complete(list("abcd"))
        assert count_paths(graph, "a", "b", 2) == 2

    def test_k4_three_edge_simple_paths_differ_from_walks(self):
        graph = AnalyticalGraph.complete(list("abcd"))
        assert count_paths(graph, "a", "b", 3) == 2
        assert walks_between(4, 3) == 7

    def test_path_graph(self):
        graph = graph_of("abc", [("a", "b"), ("b", "c")])
        assert count_paths(graph, "a", "c", 2) == 1

    def test_refuses_oversize(self):
        graph = AnalyticalGraph.complete([f"v{i}" for i in range(21)])
        with pytest.raises(ValueError, match="instance too large"):
            count_paths(graph, "v00", "v01", 2)
        small = AnalyticalGraph.complete(list("abc"))
        with pytest.raises(ValueError, match="instance too large"):
            count_paths(small, "a", "b", 7)
        assert not within_exact_limits(graph, 2)

    def test_matches_kpaths_and_brute_force(self):
        rng = random.Random(11)
        for trial in range(40):
            n = rng.randint(3, 8)
            ids = [f"v{i}" for i in range(n)]
            edges = random_graph(ids, rng.uniform(0.2, 0.9), rng)
            graph = graph_of(ids, edges)
            length = rng.randint(1, 4)
            source, target = rng.sample(ids, 2)
            exact = count_paths(graph, source, target, length)
            exhaustive = kpaths(graph, source, target, length, 10**6, rng)
            oracle = brute_force_paths(ids, edges, source, target, length)
            assert exact == len(exhaustive) == len(oracle)
            assert {p.vertices for p in exhaustive} == set(oracle)


class TestBetweennessTable:
    @pytest.mark.parametrize("n,length", [(3, 2), (5, 2), (8, 3), (6, 4)])
    def test_complete_graph_is_uniform(self, n, length):
        graph = AnalyticalGraph.complete([f"v{i}" for i in range(n)])
        table = betweenness_table(graph, length)
        values = list(table.lb.values())
        assert max(values) - min(values) < 1e-12
        assert values[0] == pytest.approx(1 / n, abs=1e-12)

    def test_path_graph_equal_thirds(self):
        graph = graph_of("abc", [("a", "b"), ("b", "c")])
        table = betweenness_table(graph, 2)
        assert table.total_paths == 2
        assert all(v == pytest.approx(1 / 3, abs=1e-15) for v in table.lb.values())

    def test_three_leaf_star(self):
        graph = graph_of("cxyz", [("c", "x"), ("c", "y"), ("c", "z")])
        table = betweenness_table(graph, 2)
        assert table.total_paths == 6
        assert table.lb["c"] == pytest.approx(1 / 3, abs=1e-15)
        for leaf in "xyz":
            assert table.lb[leaf] == pytest.approx(2 / 9, abs=1e-15)

    def test_no_paths_is_an_error(self):
        graph = graph_of("ab", [])
        with pytest.raises(ValueError, match="LB undefined"):
            betweenness_table(graph, 2)

    def test_lb_sums_to_one(self):
        rng = random.Random(23)
        for trial in range(25):
            ids = [f"v{i}" for i in range(rng.randint(3, 8))]
            graph = graph_of(ids, random_graph(ids, 0.6, rng))
            try:
                table = betweenness_table(graph, rng.choice([2, 3]))
            except ValueError:
                continue
            assert math.fsum(table.lb.values()) == pytest.approx(1.0, abs=1e-9)

    def test_csv_export(self):
        graph = graph_of("abc", [("a", "b"), ("b", "c")])
        text = betweenness_table(graph, 2).to_csv()
        lines = text.strip().split("\n")
        assert lines[0] == "node_id,sigma,kp_b,lb,estimated"
        assert len(lines) == 4
        assert lines[1].startswith("a,2,1.0,")
        assert lines[1].endswith("false")


class TestBetweennessEstimate:
    def test_k6_close_to_uniform(self):
        graph = AnalyticalGraph.complete([f"v{i}" for i in range(6)])
        table = betweenness_estimate(graph, 2, 100_000, random.Random(17))
        assert table.estimated
        for value in table.lb.values():
            assert value == pytest.approx(1 / 6, abs=0.02)

    def test_zero_paths_error(self):
        graph = graph_of("abc", [])
        with pytest.raises(ValueError, match="LB undefined"):
            betweenness_estimate(graph, 2, 100, random.Random(0))

    def test_deterministic_per_seed(self):
        ids = [f"v{i}" for i in range(7)]
        graph = graph_of(ids, random_graph(ids, 0.5, random.Random(4)))
        one = betweenness_estimate(graph, 2, 2000, random.Random(9))
        two = betweenness_estimate(graph, 2, 2000, random.Random(9))
        assert one.sigma == two.sigma and one.lb == two.lb


class TestWalkCounts:
    def test_known_values(self):
        assert walks_between(4, 2) == 2
        assert walks_between(4, 1) == 1
        assert walks_between(4, 3) == 7
        assert walks_closed(4, 1) == 0
        assert walks_closed(4, 2) == 3
        assert walks_closed(5, 4) == 52
        assert total_walks(4, 2) == 24
        assert total_walks(2, 1) == 2
        assert total_walks(6, 5) == 5 * (5**5 + 1)

    def test_matches_matrix_power_oracle(self):
        for n in range(2, 9):
            for length in range(1, 7):
                off, diag, total = matrix_walks(n, length)
                assert walks_between(n, length) == off
                assert walks_closed(n, length) == diag
                assert total_walks(n, length) == total

    def test_diagonal_exceeds_off_diagonal_by_parity_sign(self):
        # d - t = (-1)^length: for K_4 at length 2 the diagonal entries are
        # n-1 = 3 against n-2 = 2 off the diagonal.
        for n in range(2, 9):
            for length in range(1, 7):
                diff = walks_closed(n, length) - walks_between(n, length)
                assert diff == (-1) ** length

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            walks_between(1, 2)
        with pytest.raises(ValueError):
            walks_closed(4, 0)
