from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.cluster.hierarchy import linkage
from scipy.spatial.distance import squareform

from phlayout.barcode import (
    bar_metadata,
    barcode_to_json,
    brute_force_barcode,
    compute_barcode,
    sort_bars,
)
from phlayout.graph import connected_components
from phlayout.weighting import MetricMatrix, shortest_path_metric

from .conftest import make_graph, make_weighted, random_connected_graph, random_graph


def single_linkage_heights(distances: np.ndarray) -> list[float]:
    """Third oracle: merge heights straight off scipy's dendrogram."""
    if distances.shape[0] < 2:
        return []
    return sorted(linkage(squareform(distances, checks=False), "single")[:, 2].tolist())


class TestComputeBarcode:
    def test_four_node_measures_and_skipped_edge(self, four_node_wg):
        bc = compute_barcode(four_node_wg)
        assert sorted(b.persistence_measure for b in bc.bars) == [1.0, 3.0, 4.0]
        causes = {frozenset((b.cause_u, b.cause_v)) for b in bc.bars}
        assert frozenset(("v1", "v3")) not in causes  # no merge at 1/2
        assert bc.component_count == 1

    def test_single_node(self):
        from phlayout.weighting import WeightedGraph

        g = make_graph([], nodes=["solo"])
        bc = compute_barcode(WeightedGraph.from_weights(g, np.array([])))
        assert bc.bars == []
        assert bc.component_count == 1

    def test_star_unit_weights_against_oracle(self):
        wg = make_weighted([("hub", f"leaf{i}", 1.0) for i in range(3)])
        bc = compute_barcode(wg)
        assert [b.persistence_measure for b in bc.bars] == [1.0, 1.0, 1.0]
        oracle = brute_force_barcode(shortest_path_metric(wg))
        assert sorted(b.death_length for b in bc.bars) == sorted(oracle)

    def test_birth_always_zero_and_measure_exact(self):
        rng = np.random.default_rng(0)
        wg = random_connected_graph(rng, 15)
        for bar in compute_barcode(wg).bars:
            assert bar.birth == 0.0
            assert bar.persistence_measure == 1.0 / bar.death_length

    def test_bar_count_law_random_graphs(self):
        # P1: finite bars = |V| - component_count, disconnected included
        rng = np.random.default_rng(42)
        for trial in range(50):
            n = int(rng.integers(1, 25))
            g = random_graph(rng, n, float(rng.uniform(0.02, 0.4)))
            if g.edges:
                from phlayout.weighting import WeightedGraph

                wg = WeightedGraph.from_weights(
                    g, rng.uniform(0.1, 5.0, size=len(g.edges))
                )
            else:
                from phlayout.weighting import WeightedGraph

                wg = WeightedGraph.from_weights(g, np.array([]))
            bc = compute_barcode(wg)
            assert len(bc.bars) == len(g.nodes) - bc.component_count
            assert bc.component_count == len(connected_components(g))

    def test_death_multiset_stable_under_edge_permutation(self):
        # P4: graph canonicalization makes permuted input literally identical
        rng = np.random.default_rng(5)
        edges = [("a", "b", 2.0), ("b", "c", 2.0), ("c", "d", 1.0), ("a", "d", 2.0)]
        base = sorted(
            b.death_length for b in compute_barcode(make_weighted(edges)).bars
        )
        for perm in itertools.permutations(edges):
            deaths = sorted(
                b.death_length
                for b in compute_barcode(make_weighted(list(perm))).bars
            )
            assert deaths == base


class TestBarMetadata:
    def test_path_split(self):
        wg = make_weighted([("a", "b", 1.0), ("b", "c", 2.0)])
        bc = compute_barcode(wg)
        (ab,) = [b for b in bc.bars if {b.cause_u, b.cause_v} == {"a", "b"}]
        bar = bar_metadata(bc, ab.id)
        assert {bar.subset_u, bar.subset_v} == {frozenset({"a"}), frozenset({"b", "c"})}
        assert bar.subset_ratio == (1, 2)

    def test_eight_node_tree_ratio_profile(self):
        # three leaves - c1 - c2 - c3 - two leaves: ratios 1:7 x5, 4:4, 3:5
        edges = [
            ("c1", "l1", 8.0), ("c1", "l2", 7.0), ("c1", "l3", 6.0),
            ("c1", "c2", 5.0), ("c2", "c3", 4.0),
            ("c3", "m1", 3.0), ("c3", "m2", 2.0),
        ]
        bc = compute_barcode(make_weighted(edges))
        ratios = sorted(b.subset_ratio for b in bc.bars)
        assert ratios == [(1, 7)] * 5 + [(3, 5), (4, 4)]

    def test_subsets_partition_component(self):
        # P5: subset_u and subset_v exactly reconstitute the component
        rng = np.random.default_rng(8)
        for trial in range(10):
            wg = random_connected_graph(rng, 12)
            bc = compute_barcode(wg)
            all_nodes = set(wg.graph.node_ids)
            for bar_id in bc.bar_ids:
                bar = bar_metadata(bc, bar_id)
                assert bar.subset_u & bar.subset_v == frozenset()
                assert bar.subset_u | bar.subset_v == all_nodes
                assert bar.cause_u in bar.subset_u
                assert bar.cause_v in bar.subset_v

    def test_unknown_bar_id(self, four_node_wg):
        bc = compute_barcode(four_node_wg)
        with pytest.raises(KeyError):
            bar_metadata(bc, 999)


class TestSortBars:
    def test_four_node_order(self, four_node_wg):
        bc = compute_barcode(four_node_wg)
        ordered = [bc.bar(i).persistence_measure for i in sort_bars(bc)]
        assert ordered == [1.0, 3.0, 4.0]

    def test_tie_broken_by_balance(self):
        # 6-node path, two bars tied at measure 2: the 3:3 split sorts below 1:5
        edges = [
            ("p1", "p2", 2.0), ("p2", "p3", 5.0), ("p3", "p4", 2.0),
            ("p4", "p5", 4.0), ("p5", "p6", 3.0),
        ]
        bc = compute_barcode(make_weighted(edges))
        order = sort_bars(bc)
        first, second = bc.bar(order[0]), bc.bar(order[1])
        assert first.persistence_measure == second.persistence_measure == 2.0
        assert first.subset_ratio == (3, 3)
        assert second.subset_ratio == (1, 5)

    def test_single_bar(self):
        bc = compute_barcode(make_weighted([("a", "b", 1.0)]))
        assert sort_bars(bc) == [bc.bars[0].id]

    def test_remaining_ties_by_id(self):
        wg = make_weighted([("a", "b", 1.0), ("c", "d", 1.0)])
        bc = compute_barcode(wg)
        assert sort_bars(bc) == sorted(bc.bar_ids)


class TestBruteForceOracle:
    def test_four_node_metric_deaths(self, four_node_wg):
        deaths = brute_force_barcode(shortest_path_metric(four_node_wg))
        assert deaths == [0.25, 1 / 3, 1.0]

    def test_two_points(self):
        m = MetricMatrix(node_ids=("a", "b"), distances=np.array([[0.0, 5.0], [5.0, 0.0]]))
        assert brute_force_barcode(m) == [5.0]

    def test_random_metric_matches_complete_graph_barcode(self):
        rng = np.random.default_rng(17)
        pts = rng.uniform(0, 10, size=(10, 2))
        d = np.hypot(
            pts[:, 0, None] - pts[None, :, 0], pts[:, 1, None] - pts[None, :, 1]
        )
        metric = MetricMatrix(tuple(f"p{i}" for i in range(10)), d)
        complete = make_weighted(
            [
                (f"p{i}", f"p{j}", 1.0 / d[i, j])
                for i, j in itertools.combinations(range(10), 2)
            ]
        )
        deaths_direct = sorted(brute_force_barcode(metric))
        deaths_kruskal = sorted(b.death_length for b in compute_barcode(complete).bars)
        assert deaths_direct == pytest.approx(deaths_kruskal, abs=0, rel=1e-12)
        assert deaths_direct == pytest.approx(single_linkage_heights(d))


class TestOracleEquivalence:
    def test_connected_graphs_all_three_routes_agree(self):
        # P2: Kruskal deaths == union-of-balls over the Dijkstra metric
        #     == scipy single-linkage heights, exactly
        rng = np.random.default_rng(23)
        for trial in range(40):
            n = int(rng.integers(2, 13))
            wg = random_connected_graph(rng, n)
            bc = compute_barcode(wg)
            metric = shortest_path_metric(wg)
            kruskal = sorted(b.death_length for b in bc.bars)
            balls = sorted(brute_force_barcode(metric))
            dendro = single_linkage_heights(metric.distances)
            assert kruskal == balls
            assert kruskal == pytest.approx(dendro, abs=0, rel=0)

    def test_metric_sufficiency(self):
        # P3: barcode over raw edge lengths == barcode over the complete
        # graph of shortest-path distances (Dijkstra is skippable)
        rng = np.random.default_rng(29)
        for trial in range(10):
            n = int(rng.integers(3, 10))
            wg = random_connected_graph(rng, n)
            metric = shortest_path_metric(wg)
            names = metric.node_ids
            complete = make_weighted(
                [
                    (names[i], names[j], 1.0 / metric.distances[i, j])
                    for i, j in itertools.combinations(range(n), 2)
                ]
            )
            direct = sorted(b.death_length for b in compute_barcode(wg).bars)
            closure = sorted(b.death_length for b in compute_barcode(complete).bars)
            assert direct == pytest.approx(closure, abs=0, rel=1e-12)


@given(
    st.lists(
        st.tuples(
            st.integers(0, 9),
            st.integers(0, 9),
            st.floats(min_value=0.1, max_value=10.0, allow_nan=False),
        ),
        max_size=25,
    ),
    st.integers(0, 5),
)
def test_bar_count_law_holds_for_any_graph(edges, extra_nodes):
    from phlayout.weighting import WeightedGraph, lengths_from_weights

    records = [(f"n{a}", f"n{b}", w) for a, b, w in edges if a != b]
    g = make_graph(records, nodes=[f"m{i}" for i in range(extra_nodes)])
    if g.edges:
        wg = lengths_from_weights(g)
    else:
        wg = WeightedGraph.from_weights(g, np.array([]))
    bc = compute_barcode(wg)
    assert len(bc.bars) == len(g.nodes) - bc.component_count


def test_export_schema(four_node_wg):
    bc = compute_barcode(four_node_wg)
    doc = barcode_to_json(bc)
    assert set(doc) == {"bars", "components"}
    assert doc["components"] == 1
    for entry in doc["bars"]:
        assert set(entry) == {"id", "persistence", "cause", "ratio"}
        assert len(entry["cause"]) == 2
        assert entry["ratio"][0] <= entry["ratio"][1]


def test_component_count_plus_bars_equals_nodes(four_node_wg):
    bc = compute_barcode(four_node_wg)
    assert len(bc.bars) + bc.component_count == len(four_node_wg.graph.nodes)
