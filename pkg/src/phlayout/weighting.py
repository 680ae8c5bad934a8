"""Edge weights for unweighted graphs (Jaccard over ego neighborhoods) and
conversion of weights to metric lengths; shortest-path metric for validation."""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph import Graph

JACCARD_FLOOR = 1e-6

# The full metric matrix is O(n^2); it exists for oracle/testing use only,
# the layout pipeline never needs it.
METRIC_MATRIX_NODE_LIMIT = 2000


class AlreadyWeightedError(ValueError):
    """The graph already carries weights; callers should skip weighting."""


@dataclass(frozen=True)
class WeightedGraph:
    """A graph plus per-edge weight w > 0 and length d = 1/w, edge-aligned."""

    graph: Graph
    weights: np.ndarray
    lengths: np.ndarray

    @staticmethod
    def from_weights(graph: Graph, weights: np.ndarray) -> "WeightedGraph":
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (len(graph.edges),):
            raise ValueError("one weight per edge required")
        if not np.all(weights > 0):
            raise ValueError("weights must be strictly positive")
        return WeightedGraph(graph=graph, weights=weights, lengths=1.0 / weights)

    def weight_of(self, source: str, target: str) -> float:
        key = (source, target) if source < target else (target, source)
        for i, e in enumerate(self.graph.edges):
            if (e.source, e.target) == key:
                return float(self.weights[i])
        raise KeyError(f"no edge {source!r}-{target!r}")


@dataclass(frozen=True)
class MetricMatrix:
    """Symmetric shortest-path distances (inf across components)."""

    node_ids: tuple[str, ...]
    distances: np.ndarray

    def distance(self, a: str, b: str) -> float:
        return float(self.distances[self.node_ids.index(a), self.node_ids.index(b)])


def ego_neighborhood(g: Graph, node_id: str, hops: int) -> set[str]:
    """All nodes within <= hops edges of ``node_id``, the node itself included."""
    if hops < 1:
        raise ValueError("hops must be >= 1")
    start = g.node_index(node_id)
    adj = g.adjacency()
    depth = {start: 0}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if depth[cur] == hops:
            continue
        for nxt in adj[cur]:
            if nxt not in depth:
                depth[nxt] = depth[cur] + 1
                queue.append(nxt)
    return {g.nodes[i].id for i in depth}


def default_hops(g: Graph) -> int:
    """1 hop for denser graphs (mean degree >= 4), 2 for sparser ones."""
    if not g.nodes:
        return 1
    mean_degree = 2 * len(g.edges) / len(g.nodes)
    return 1 if mean_degree >= 4 else 2


def jaccard_weights(g: Graph, hops: int) -> WeightedGraph:
    """Weight every edge by the Jaccard index of its endpoints' ego neighborhoods.

    Values are clamped to [1e-6, 1] so lengths 1/w stay finite.
    """
    if g.is_weighted:
        raise AlreadyWeightedError("graph already has weights")
    if hops < 1:
        raise ValueError("hops must be >= 1")
    adj = g.adjacency()
    n = len(g.nodes)
    neighborhoods: list[set[int]] = []
    for start in range(n):
        depth = {start: 0}
        queue = deque([start])
        while queue:
            cur = queue.popleft()
            if depth[cur] == hops:
                continue
            for nxt in adj[cur]:
                if nxt not in depth:
                    depth[nxt] = depth[cur] + 1
                    queue.append(nxt)
        neighborhoods.append(set(depth))
    u, v = g.edge_index_arrays()
    weights = np.empty(len(g.edges), dtype=np.float64)
    for i, (a, b) in enumerate(zip(u.tolist(), v.tolist())):
        na, nb = neighborhoods[a], neighborhoods[b]
        jaccard = len(na & nb) / len(na | nb)
        weights[i] = min(max(jaccard, JACCARD_FLOOR), 1.0)
    return WeightedGraph.from_weights(g, weights)


def lengths_from_weights(g: Graph) -> WeightedGraph:
    """Use the weights the graph already carries; lengths become 1/w."""
    if not g.is_weighted:
        raise ValueError("graph has no weights; use jaccard_weights instead")
    weights = np.array([e.weight for e in g.edges], dtype=np.float64)
    return WeightedGraph.from_weights(g, weights)


def weigh_graph(g: Graph, weighting: str = "auto", hops: int | None = None) -> WeightedGraph:
    """Dispatch: 'given' uses stored weights, 'jaccard' computes them,
    'auto' picks 'given' when weights exist."""
    if weighting == "auto":
        weighting = "given" if g.is_weighted else "jaccard"
    if weighting == "given":
        return lengths_from_weights(g)
    if weighting == "jaccard":
        return jaccard_weights(g, hops if hops is not None else default_hops(g))
    raise ValueError(f"unknown weighting {weighting!r}")


def _dijkstra(adj: list[list[tuple[int, float]]], source: int) -> np.ndarray:
    n = len(adj)
    dist = np.full(n, np.inf)
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, cur = heapq.heappop(heap)
        if d > dist[cur]:
            continue
        for nxt, length in adj[cur]:
            nd = d + length
            if nd < dist[nxt]:
                dist[nxt] = nd
                heapq.heappush(heap, (nd, nxt))
    return dist


def shortest_path_metric(wg: WeightedGraph) -> MetricMatrix:
    """All-pairs shortest paths under edge lengths 1/w (binary-heap Dijkstra)."""
    g = wg.graph
    n = len(g.nodes)
    if n > METRIC_MATRIX_NODE_LIMIT:
        raise ValueError(
            f"metric matrix is limited to {METRIC_MATRIX_NODE_LIMIT} nodes (got {n})"
        )
    adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    u, v = g.edge_index_arrays()
    for a, b, length in zip(u.tolist(), v.tolist(), wg.lengths.tolist()):
        adj[a].append((b, length))
        adj[b].append((a, length))
    distances = np.empty((n, n), dtype=np.float64)
    for source in range(n):
        distances[source] = _dijkstra(adj, source)
    return MetricMatrix(node_ids=tuple(g.node_ids), distances=distances)
