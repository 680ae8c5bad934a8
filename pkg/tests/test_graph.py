from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from phlayout.graph import (
    GraphFormatError,
    GraphParseWarning,
    connected_components,
    degree_color_scale,
    parse_graph,
    serialize_graph,
)

from .conftest import FOUR_NODE_EDGE_LIST, make_graph


class TestParseEdgeList:
    def test_weighted_lines(self):
        g = parse_graph("a b 3\nb c 4")
        assert [n.id for n in g.nodes] == ["a", "b", "c"]
        assert len(g.edges) == 2
        assert g.is_weighted
        assert {(e.source, e.target, e.weight) for e in g.edges} == {
            ("a", "b", 3.0),
            ("b", "c", 4.0),
        }

    def test_self_loop_dropped_with_warning(self):
        with pytest.warns(GraphParseWarning, match="self-loop"):
            g = parse_graph("a a 1")
        assert [n.id for n in g.nodes] == ["a"]
        assert g.edges == ()

    def test_non_positive_weight_rejected(self):
        with pytest.raises(GraphFormatError, match="positive"):
            parse_graph("a b -2")
        with pytest.raises(GraphFormatError, match="positive"):
            parse_graph("a b 0")

    def test_malformed_line_reports_line_number(self):
        with pytest.raises(GraphFormatError, match="line 2"):
            parse_graph("a b\nc d e f g")
        with pytest.raises(GraphFormatError, match="line 1"):
            parse_graph("a b notaweight")

    def test_comments_and_blank_lines(self):
        g = parse_graph("# header\na b 2  # trailing\n\nb c 1\n")
        assert len(g.edges) == 2

    def test_mixed_weighted_unweighted_rejected(self):
        with pytest.raises(GraphFormatError, match="mixed"):
            parse_graph("a b 2\nb c")

    def test_duplicate_edges_merge_and_sum(self):
        g = parse_graph("a b 2\nb a 3")
        assert len(g.edges) == 1
        assert g.edges[0].weight == 5.0

    def test_degrees_derived(self):
        g = parse_graph(FOUR_NODE_EDGE_LIST)
        degrees = {n.id: n.degree for n in g.nodes}
        assert degrees == {"v1": 2, "v2": 2, "v3": 3, "v4": 1}


class TestParseGraphJson:
    def test_roundtrip_identity(self, four_node_graph):
        text = serialize_graph(four_node_graph)
        assert parse_graph(text, "graph_json") == four_node_graph

    def test_roundtrip_with_categories(self):
        g = parse_graph(
            '{"nodes":[{"id":"x","category":"red"},{"id":"y"}],'
            '"edges":[{"source":"x","target":"y"}]}',
            "graph_json",
        )
        assert g.nodes[0].category == "red"
        assert parse_graph(serialize_graph(g), "graph_json") == g

    def test_unknown_endpoint_rejected(self):
        with pytest.raises(GraphFormatError, match="unknown node"):
            parse_graph(
                '{"nodes":[{"id":"x"}],"edges":[{"source":"x","target":"zzz"}]}',
                "graph_json",
            )

    def test_duplicate_node_id_rejected(self):
        with pytest.raises(GraphFormatError, match="duplicate"):
            parse_graph(
                '{"nodes":[{"id":"x"},{"id":"x"}],"edges":[]}', "graph_json"
            )


@given(st.permutations(FOUR_NODE_EDGE_LIST.strip().splitlines()))
def test_line_order_never_changes_the_graph(lines):
    assert parse_graph("\n".join(lines)) == parse_graph(FOUR_NODE_EDGE_LIST)


def test_duplicate_edge_merge_is_order_independent():
    a = parse_graph("a b 1\na c 5\nb a 2")
    b = parse_graph("b a 2\na c 5\na b 1")
    assert a == b
    assert a.edges[0].weight == 3.0


class TestConnectedComponents:
    def test_four_node_is_one_block(self, four_node_graph):
        blocks = connected_components(four_node_graph)
        assert blocks == [{"v1", "v2", "v3", "v4"}]

    def test_empty_graph(self):
        assert connected_components(make_graph([])) == []

    def test_two_disjoint_edges(self):
        g = make_graph([("a", "b"), ("c", "d")])
        assert connected_components(g) == [{"a", "b"}, {"c", "d"}]


class TestDegreeColorScale:
    def test_star_extremes(self):
        g = make_graph([("hub", f"leaf{i}") for i in range(4)])
        scale = degree_color_scale(g)
        assert scale["hub"] == 1.0
        assert all(scale[f"leaf{i}"] == 0.0 for i in range(4))

    def test_constant_degree_maps_to_zero(self):
        cycle = make_graph([("a", "b"), ("b", "c"), ("c", "a")])
        assert set(degree_color_scale(cycle).values()) == {0.0}

    def test_path_hand_enumeration(self, path3):
        # degrees a:1 b:2 c:1 -> b at 1.0, ends at 0.0
        assert degree_color_scale(path3) == {"a": 0.0, "b": 1.0, "c": 0.0}

    def test_empty_graph_rejected(self):
        with pytest.raises(ValueError):
            degree_color_scale(make_graph([]))
