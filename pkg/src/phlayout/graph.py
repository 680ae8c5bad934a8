"""Undirected graph model, parsing, validation, and connectivity."""
from __future__ import annotations

import json
import warnings
from collections import deque
from dataclasses import dataclass, field

import numpy as np


class GraphFormatError(ValueError):
    """Malformed input or a graph-invariant violation while parsing."""


class GraphParseWarning(UserWarning):
    """Non-fatal parse diagnostics, e.g. dropped self-loops."""


@dataclass(frozen=True)
class NodeRecord:
    id: str
    category: str | None = None
    degree: int = 0


@dataclass(frozen=True)
class EdgeRecord:
    source: str
    target: str
    weight: float | None = None


@dataclass(eq=False)
class Graph:
    """Canonicalized undirected graph.

    Nodes are sorted by id; every edge is stored with source < target and
    edges are sorted by that pair, so two graphs built from any line/record
    ordering of the same data compare equal.
    """

    nodes: tuple[NodeRecord, ...]
    edges: tuple[EdgeRecord, ...]
    directed: bool = False  # always False; kept explicit for serialization

    _node_index: dict[str, int] = field(init=False, repr=False)
    _edge_arrays: tuple[np.ndarray, np.ndarray] | None = field(
        init=False, repr=False, default=None
    )

    def __post_init__(self):
        self._node_index = {n.id: i for i, n in enumerate(self.nodes)}

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.nodes == other.nodes and self.edges == other.edges

    @property
    def node_ids(self) -> list[str]:
        return [n.id for n in self.nodes]

    def node_index(self, node_id: str) -> int:
        try:
            return self._node_index[node_id]
        except KeyError:
            raise KeyError(f"unknown node id {node_id!r}") from None

    @property
    def is_weighted(self) -> bool:
        return bool(self.edges) and self.edges[0].weight is not None

    def edge_index_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge endpoints as two parallel int32 index arrays."""
        if self._edge_arrays is None:
            u = np.fromiter(
                (self._node_index[e.source] for e in self.edges),
                dtype=np.int32,
                count=len(self.edges),
            )
            v = np.fromiter(
                (self._node_index[e.target] for e in self.edges),
                dtype=np.int32,
                count=len(self.edges),
            )
            self._edge_arrays = (u, v)
        return self._edge_arrays

    def adjacency(self) -> list[list[int]]:
        """Adjacency lists over node indices."""
        adj: list[list[int]] = [[] for _ in self.nodes]
        u, v = self.edge_index_arrays()
        for a, b in zip(u.tolist(), v.tolist()):
            adj[a].append(b)
            adj[b].append(a)
        return adj


def build_graph(
    node_records: list[tuple[str, str | None]],
    edge_records: list[tuple[str, str, float | None]],
    implicit_nodes: bool = False,
) -> Graph:
    """Canonicalize raw records into a Graph, enforcing all invariants.

    Duplicate undirected edges are merged (weights summed), self-loops are
    dropped with a warning. With ``implicit_nodes`` endpoints not in
    ``node_records`` create nodes on the fly (edge-list convention).
    """
    categories: dict[str, str | None] = {}
    for node_id, category in node_records:
        if node_id in categories:
            raise GraphFormatError(f"duplicate node id {node_id!r}")
        categories[node_id] = category

    merged: dict[tuple[str, str], float | None] = {}
    any_weighted = False
    any_unweighted = False
    for source, target, weight in edge_records:
        for endpoint in (source, target):
            if endpoint not in categories:
                if implicit_nodes:
                    categories[endpoint] = None
                else:
                    raise GraphFormatError(
                        f"edge ({source!r}, {target!r}) references unknown node {endpoint!r}"
                    )
        if source == target:
            warnings.warn(
                f"dropping self-loop on node {source!r}", GraphParseWarning, stacklevel=3
            )
            continue
        if weight is not None:
            any_weighted = True
            if weight <= 0:
                raise GraphFormatError(
                    f"edge ({source!r}, {target!r}) has non-positive weight {weight}"
                )
        else:
            any_unweighted = True
        key = (source, target) if source < target else (target, source)
        if key in merged:
            old = merged[key]
            if (old is None) != (weight is None):
                any_weighted = True
                any_unweighted = True
            elif weight is not None:
                merged[key] = old + weight
        else:
            merged[key] = weight
    if any_weighted and any_unweighted:
        raise GraphFormatError("mixed weighted and unweighted edges")

    degrees = {node_id: 0 for node_id in categories}
    for a, b in merged:
        degrees[a] += 1
        degrees[b] += 1

    nodes = tuple(
        NodeRecord(id=node_id, category=categories[node_id], degree=degrees[node_id])
        for node_id in sorted(categories)
    )
    edges = tuple(
        EdgeRecord(source=a, target=b, weight=merged[(a, b)])
        for a, b in sorted(merged)
    )
    return Graph(nodes=nodes, edges=edges)


def _parse_edge_list(text: str) -> Graph:
    edge_records: list[tuple[str, str, float | None]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphFormatError(
                f"line {lineno}: expected 'SOURCE TARGET [WEIGHT]', got {raw!r}"
            )
        weight = None
        if len(parts) == 3:
            try:
                weight = float(parts[2])
            except ValueError:
                raise GraphFormatError(
                    f"line {lineno}: weight {parts[2]!r} is not a number"
                ) from None
            if not np.isfinite(weight) or weight <= 0:
                raise GraphFormatError(
                    f"line {lineno}: weight must be a positive finite number, got {parts[2]}"
                )
        edge_records.append((parts[0], parts[1], weight))
    return build_graph([], edge_records, implicit_nodes=True)


def _parse_graph_json(text: str) -> Graph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "nodes" not in doc or "edges" not in doc:
        raise GraphFormatError("graph JSON must be an object with 'nodes' and 'edges'")
    node_records = []
    for i, node in enumerate(doc["nodes"]):
        if not isinstance(node, dict) or "id" not in node:
            raise GraphFormatError(f"node record {i} is missing 'id'")
        category = node.get("category")
        if category is not None and not isinstance(category, str):
            raise GraphFormatError(f"node record {i}: category must be a string")
        node_records.append((str(node["id"]), category))
    edge_records = []
    for i, edge in enumerate(doc["edges"]):
        if not isinstance(edge, dict) or "source" not in edge or "target" not in edge:
            raise GraphFormatError(f"edge record {i} needs 'source' and 'target'")
        weight = edge.get("weight")
        if weight is not None:
            weight = float(weight)
            if not np.isfinite(weight) or weight <= 0:
                raise GraphFormatError(
                    f"edge record {i}: weight must be a positive finite number"
                )
        edge_records.append((str(edge["source"]), str(edge["target"]), weight))
    return build_graph(node_records, edge_records, implicit_nodes=False)


def parse_graph(text: str | bytes, format: str = "edge_list") -> Graph:
    """Parse ``text`` as the given format ('edge_list' or 'graph_json')."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    if format == "edge_list":
        return _parse_edge_list(text)
    if format == "graph_json":
        return _parse_graph_json(text)
    raise ValueError(f"unknown graph format {format!r}")


def serialize_graph(g: Graph) -> str:
    """Canonical graph JSON; parse(serialize(g)) == g."""
    nodes = []
    for n in g.nodes:
        rec: dict = {"id": n.id}
        if n.category is not None:
            rec["category"] = n.category
        nodes.append(rec)
    edges = []
    for e in g.edges:
        rec = {"source": e.source, "target": e.target}
        if e.weight is not None:
            rec["weight"] = e.weight
        edges.append(rec)
    return json.dumps({"nodes": nodes, "edges": edges}, indent=1)


def connected_components(g: Graph) -> list[set[str]]:
    """Partition of node ids into connected components.

    Blocks are ordered by their smallest member (canonical node order).
    """
    adj = g.adjacency()
    seen = [False] * len(g.nodes)
    blocks: list[set[str]] = []
    for start in range(len(g.nodes)):
        if seen[start]:
            continue
        seen[start] = True
        queue = deque([start])
        block = {start}
        while queue:
            cur = queue.popleft()
            for nxt in adj[cur]:
                if not seen[nxt]:
                    seen[nxt] = True
                    block.add(nxt)
                    queue.append(nxt)
        blocks.append({g.nodes[i].id for i in block})
    return blocks


def component_labels(g: Graph) -> np.ndarray:
    """Per-node component index (int32), components in canonical order."""
    labels = np.full(len(g.nodes), -1, dtype=np.int32)
    for comp_id, block in enumerate(connected_components(g)):
        for node_id in block:
            labels[g.node_index(node_id)] = comp_id
    return labels


def degree_color_scale(g: Graph) -> dict[str, float]:
    """Map node id -> degree normalized to [0, 1]; constant-degree graphs map to 0."""
    if not g.nodes:
        raise ValueError("degree_color_scale needs at least one node")
    degrees = [n.degree for n in g.nodes]
    lo, hi = min(degrees), max(degrees)
    if hi == lo:
        return {n.id: 0.0 for n in g.nodes}
    span = hi - lo
    return {n.id: (n.degree - lo) / span for n in g.nodes}
