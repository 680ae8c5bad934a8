from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from phlayout.graph import Graph, build_graph, parse_graph
from phlayout.weighting import WeightedGraph, lengths_from_weights

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# The 4-node example graph: weights (v1,v2)=3, (v1,v3)=2, (v2,v3)=4, (v3,v4)=1.
FOUR_NODE_EDGE_LIST = "v1 v2 3\nv1 v3 2\nv2 v3 4\nv3 v4 1\n"


def make_graph(edges, nodes=()) -> Graph:
    """Graph from (source, target[, weight]) tuples; extra bare nodes allowed."""
    records = []
    for e in edges:
        if len(e) == 2:
            records.append((str(e[0]), str(e[1]), None))
        else:
            records.append((str(e[0]), str(e[1]), float(e[2])))
    node_records = [(str(n), None) for n in nodes]
    return build_graph(node_records, records, implicit_nodes=True)


def make_weighted(edges) -> WeightedGraph:
    return lengths_from_weights(make_graph(edges))


def random_connected_graph(rng: np.random.Generator, n: int) -> WeightedGraph:
    """Random spanning tree plus extra edges, random positive weights."""
    edges = set()
    for i in range(1, n):
        edges.add((int(rng.integers(0, i)), i))
    extra = int(rng.integers(0, n))
    for _ in range(extra):
        a, b = int(rng.integers(0, n)), int(rng.integers(0, n))
        if a != b:
            edges.add((min(a, b), max(a, b)))
    weights = rng.uniform(0.1, 10.0, size=len(edges))
    return make_weighted(
        [(f"n{a}", f"n{b}", w) for (a, b), w in zip(sorted(edges), weights)]
    )


def random_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    """Erdos-Renyi-style graph, possibly disconnected, unweighted."""
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.uniform() < p:
                edges.append((f"n{a}", f"n{b}"))
    return make_graph(edges, nodes=[f"n{i}" for i in range(n)])


@pytest.fixture
def four_node_graph() -> Graph:
    return parse_graph(FOUR_NODE_EDGE_LIST)


@pytest.fixture
def four_node_wg(four_node_graph) -> WeightedGraph:
    return lengths_from_weights(four_node_graph)


@pytest.fixture
def path3() -> Graph:
    return make_graph([("a", "b"), ("b", "c")])


@pytest.fixture
def two_triangles() -> Graph:
    """Two unit-weight triangles joined by one bridge edge."""
    return make_graph(
        [
            ("a", "b", 1), ("b", "c", 1), ("a", "c", 1),
            ("d", "e", 1), ("e", "f", 1), ("d", "f", 1),
            ("c", "d", 1),
        ]
    )


@pytest.fixture(scope="session")
def barbell_graph() -> Graph:
    return parse_graph((FIXTURES / "barbell.json").read_text(), "graph_json")


@pytest.fixture(scope="session")
def lesmis_graph() -> Graph:
    return parse_graph((FIXTURES / "lesmis.json").read_text(), "graph_json")
