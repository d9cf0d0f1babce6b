import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onionpath.metrics import (
    AdversaryModel,
    Pmf,
    adversary_success,
    anonymity_degree,
    degree_bw,
    degree_geo,
    degree_grp,
    entropy,
)
from onionpath.paths import AnalyticalGraph

from helpers import brute_force_betweenness


def uniform_pmf(n):
    return Pmf.uniform(f"n{i}" for i in range(n))


class TestPmf:
    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError):
            Pmf({"a": 0.5, "b": 0.6})

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            Pmf({"a": -0.1, "b": 1.1})

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            Pmf({})

    def test_normalises_float_noise(self):
        pmf = Pmf({"a": 0.1 + 0.2, "b": 0.7 - 1e-12})
        assert math.isclose(math.fsum(pmf.values()), 1.0, abs_tol=1e-15)

    def test_from_counts(self):
        pmf = Pmf.from_counts({"a": 3, "b": 1})
        assert pmf["a"] == 0.75 and pmf["b"] == 0.25

    def test_zero_mass_allowed_but_not_in_support(self):
        pmf = Pmf({"a": 1.0, "b": 0.0})
        assert pmf.support() == ["a"]

    def test_uniform_rejects_duplicates(self):
        with pytest.raises(ValueError):
            Pmf.uniform(["a", "a"])


class TestEntropy:
    def test_uniform_100(self):
        assert entropy(uniform_pmf(100)) == pytest.approx(math.log2(100), abs=1e-12)

    def test_degenerate(self):
        assert entropy(Pmf({"a": 1.0})) == 0.0

    def test_one_fair_bit(self):
        assert entropy(Pmf({"a": 0.5, "b": 0.5})) == 1.0

    @given(
        st.lists(st.floats(min_value=1e-6, max_value=1.0), min_size=1, max_size=40)
    )
    def test_bounded_by_support_size(self, weights):
        total = math.fsum(weights)
        pmf = Pmf({f"n{i}": w / total for i, w in enumerate(weights)})
        assert entropy(pmf) <= math.log2(len(weights)) + 1e-9

    @given(st.integers(min_value=1, max_value=200))
    def test_uniform_achieves_bound(self, n):
        assert entropy(uniform_pmf(n)) == math.log2(n)

    def test_non_uniform_strictly_below_bound(self):
        pmf = Pmf({"a": 0.7, "b": 0.3})
        assert entropy(pmf) < 1.0 - 1e-9


class TestAnonymityDegree:
    def test_uniform_is_exactly_one(self):
        assert anonymity_degree(uniform_pmf(100), 100).value == 1.0

    def test_restricted_support(self):
        pmf = Pmf({f"n{i}": (1 / 27 if i < 27 else 0.0) for i in range(100)})
        got = anonymity_degree(pmf, 100).value
        assert got == pytest.approx(math.log2(27) / math.log2(100), abs=1e-12)

    def test_degenerate_pmf_gives_zero(self):
        assert anonymity_degree(Pmf({"a": 1.0}), 100).value == 0.0

    @pytest.mark.parametrize("n", [0, 1])
    def test_tiny_population_rejected(self, n):
        with pytest.raises(ValueError, match="degenerate network"):
            anonymity_degree(Pmf({"a": 1.0}), n)

    def test_support_must_fit_population(self):
        with pytest.raises(ValueError):
            anonymity_degree(uniform_pmf(5), 3)

    @given(
        st.lists(st.floats(min_value=1e-9, max_value=1.0), min_size=2, max_size=30)
    )
    def test_value_in_unit_interval(self, weights):
        total = math.fsum(weights)
        pmf = Pmf({f"n{i}": w / total for i, w in enumerate(weights)})
        degree = anonymity_degree(pmf, len(weights))
        assert 0.0 <= degree.value <= 1.0


class TestAdversarySuccess:
    def test_uniform_ten_of_hundred(self):
        model = AdversaryModel(tuple([1 / 100] * 10))
        assert adversary_success(model) == (10 / 100) ** 2

    def test_two_controlled(self):
        assert adversary_success(AdversaryModel((0.2, 0.3))) == pytest.approx(0.25)

    def test_empty_set(self):
        assert adversary_success(AdversaryModel(())) == 0.0

    def test_rejects_overweight(self):
        with pytest.raises(ValueError):
            AdversaryModel((0.7, 0.7))

    @given(
        st.lists(st.floats(min_value=0.0, max_value=0.2), min_size=1, max_size=5),
        st.data(),
    )
    def test_monotone_in_each_probability(self, probs, data):
        base = adversary_success(AdversaryModel(tuple(probs)))
        idx = data.draw(st.integers(min_value=0, max_value=len(probs) - 1))
        bump = data.draw(st.floats(min_value=0.0, max_value=0.1))
        bigger = list(probs)
        bigger[idx] += bump
        assert adversary_success(AdversaryModel(tuple(bigger))) >= base


class TestDegreeGeo:
    def test_paper_population(self):
        assert degree_geo(27, 100) == pytest.approx(0.7157, abs=5e-5)

    def test_whole_network_in_country(self):
        assert degree_geo(100, 100) == 1.0

    def test_single_node_country(self):
        assert degree_geo(1, 100) == 0.0

    def test_empty_country(self):
        with pytest.raises(ValueError, match="empty country"):
            degree_geo(0, 100)

    def test_country_cannot_exceed_population(self):
        with pytest.raises(ValueError):
            degree_geo(101, 100)

    def test_strictly_increasing_in_country_size(self):
        for n in (2, 3, 10, 50, 100, 200):
            degrees = [degree_geo(m, n) for m in range(1, n + 1)]
            assert all(b > a for a, b in zip(degrees, degrees[1:]))


class TestDegreeBw:
    def test_equal_bandwidths_exact_one(self):
        for k in (2, 3, 17):
            assert degree_bw([123.45] * k).value == 1.0

    def test_three_nodes_hand_computed(self):
        got = degree_bw([1.0, 1.0, 2.0]).value
        assert got == pytest.approx(1.5 / math.log2(3), abs=1e-12)

    def test_dominant_node_low_degree(self):
        assert degree_bw([1_000_000.0, 1.0, 1.0]).value < 0.1

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            degree_bw([100.0, 0.0])

    def test_rejects_single_node(self):
        with pytest.raises(ValueError):
            degree_bw([100.0])

    @given(
        st.lists(st.floats(min_value=0.5, max_value=500.0), min_size=2, max_size=20),
        st.floats(min_value=0.01, max_value=1000.0),
    )
    @settings(max_examples=50)
    def test_scale_invariant(self, bandwidths, factor):
        base = degree_bw(bandwidths).value
        scaled = degree_bw([b * factor for b in bandwidths]).value
        assert scaled == pytest.approx(base, abs=1e-9)


class TestDegreeGrp:
    def test_complete_graph_is_exactly_one(self):
        graph = AnalyticalGraph.complete([f"v{i}" for i in range(20)])
        assert degree_grp(graph, 2).value == 1.0

    def test_isolated_vertex_below_one(self):
        ids = [f"v{i}" for i in range(6)]
        core = AnalyticalGraph.complete(ids[:5])
        graph = AnalyticalGraph(frozenset(ids), core.edges, dict(core.edge_weight))
        assert degree_grp(graph, 2).value < 1.0

    def test_star_matches_brute_force(self):
        ids = ["c", "l1", "l2", "l3", "l4"]
        edges = frozenset(tuple(sorted(("c", leaf))) for leaf in ids[1:])
        graph = AnalyticalGraph(frozenset(ids), edges)
        _, lb, _ = brute_force_betweenness(ids, edges, 2)
        expected = -math.fsum(
            p * math.log2(p) for p in lb.values() if p > 0
        ) / math.log2(len(ids))
        assert degree_grp(graph, 2).value == pytest.approx(expected, abs=1e-12)

    def test_no_paths_is_an_error(self):
        graph = AnalyticalGraph(frozenset({"a", "b"}), frozenset())
        with pytest.raises(ValueError, match="LB undefined"):
            degree_grp(graph, 2)

    def test_large_graph_requires_rng(self):
        graph = AnalyticalGraph.complete([f"v{i}" for i in range(25)])
        with pytest.raises(ValueError):
            degree_grp(graph, 2)

    def test_large_graph_estimated_flag(self):
        graph = AnalyticalGraph.complete([f"v{i}" for i in range(25)])
        degree = degree_grp(graph, 2, samples=4000, rng=random.Random(5))
        assert degree.estimated
        assert degree.value == pytest.approx(1.0, abs=0.01)
        exact_small = degree_grp(AnalyticalGraph.complete([f"v{i}" for i in range(8)]), 2)
        assert not exact_small.estimated
