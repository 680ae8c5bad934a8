"""Minimum spanning tree and 0-dimensional persistence barcode.

Kruskal over edge lengths 1/w with a disjoint-set forest; each merge emits a
bar (birth 0, death 1/w). Per-bar metadata (cause pair, subsets from cutting
the bar's MST edge, subset ratio) drives the interactive forces. A direct
union-of-balls sweep over a metric matrix serves as the validation oracle.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .weighting import MetricMatrix, WeightedGraph


@dataclass
class Bar:
    id: int
    birth: float
    death_length: float
    persistence_measure: float  # 1 / death_length
    cause_u: str
    cause_v: str
    component_id: int
    subset_ratio: tuple[int, int]  # (min count, max count) across the cut
    subset_u: frozenset[str] | None = None  # populated lazily
    subset_v: frozenset[str] | None = None

    @property
    def balance(self) -> float:
        """min/max of the subset ratio; 1.0 is a 50/50 split."""
        small, large = self.subset_ratio
        return small / large


@dataclass
class Barcode:
    bars: list[Bar]
    component_count: int
    mst_edges: list[int]  # edge indices into wg.graph.edges, parallel to bars
    wg: WeightedGraph = field(repr=False)

    _bar_by_id: dict[int, Bar] = field(init=False, repr=False)
    _mst_adj: list[list[tuple[int, int]]] = field(init=False, repr=False)

    def __post_init__(self):
        self._bar_by_id = {bar.id: bar for bar in self.bars}
        g = self.wg.graph
        u, v = g.edge_index_arrays()
        adj: list[list[tuple[int, int]]] = [[] for _ in g.nodes]
        for bar, edge_idx in zip(self.bars, self.mst_edges):
            a, b = int(u[edge_idx]), int(v[edge_idx])
            adj[a].append((b, bar.id))
            adj[b].append((a, bar.id))
        self._mst_adj = adj

    def bar(self, bar_id: int) -> Bar:
        try:
            return self._bar_by_id[bar_id]
        except KeyError:
            raise KeyError(f"unknown bar id {bar_id}") from None

    @property
    def bar_ids(self) -> list[int]:
        return [bar.id for bar in self.bars]


class _DisjointSet:
    """Union by size with path halving."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> int:
        """Merge the sets of a and b; returns the root that survives."""
        ra, rb = self.find(a), self.find(b)
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return ra


def compute_barcode(wg: WeightedGraph) -> Barcode:
    """Kruskal scan in increasing 1/w; every cross-component edge emits a bar.

    Ties are broken by canonical edge order, so the MST (and everything
    derived from it) is deterministic. Infinite bars are omitted;
    ``component_count`` reports them instead.
    """
    g = wg.graph
    n = len(g.nodes)
    u, v = g.edge_index_arrays()
    order = np.argsort(wg.lengths, kind="stable")
    dsu = _DisjointSet(n)
    bar_edges: list[int] = []
    deaths: list[float] = []
    for edge_idx in order.tolist():
        a, b = int(u[edge_idx]), int(v[edge_idx])
        if dsu.find(a) != dsu.find(b):
            dsu.union(a, b)
            bar_edges.append(edge_idx)
            deaths.append(float(wg.lengths[edge_idx]))

    # Component ids in canonical order of their first node.
    root_to_component: dict[int, int] = {}
    node_component = np.empty(n, dtype=np.int32)
    for i in range(n):
        root = dsu.find(i)
        if root not in root_to_component:
            root_to_component[root] = len(root_to_component)
        node_component[i] = root_to_component[root]
    component_count = len(root_to_component) if n else 0

    ratios = _subset_ratios(n, u, v, bar_edges, node_component)
    bars = []
    for bar_id, (edge_idx, death) in enumerate(zip(bar_edges, deaths)):
        edge = g.edges[edge_idx]
        bars.append(
            Bar(
                id=bar_id,
                birth=0.0,
                death_length=death,
                persistence_measure=1.0 / death,
                cause_u=edge.source,
                cause_v=edge.target,
                component_id=int(node_component[g.node_index(edge.source)]),
                subset_ratio=ratios[bar_id],
            )
        )
    return Barcode(bars=bars, component_count=component_count, mst_edges=bar_edges, wg=wg)


def _subset_ratios(
    n: int,
    u: np.ndarray,
    v: np.ndarray,
    bar_edges: list[int],
    node_component: np.ndarray,
) -> list[tuple[int, int]]:
    """Subset ratios for every bar in one O(|V|) rooted-MST pass.

    Cutting MST edge e splits its component; the side below e in a rooted
    traversal has size = subtree size, the other side the remainder.
    """
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for bar_id, edge_idx in enumerate(bar_edges):
        a, b = int(u[edge_idx]), int(v[edge_idx])
        adj[a].append((b, bar_id))
        adj[b].append((a, bar_id))

    component_size = np.bincount(node_component, minlength=node_component.max() + 1 if n else 0)
    subtree = [1] * n
    ratios: list[tuple[int, int]] = [(0, 0)] * len(bar_edges)
    visited = [False] * n
    for start in range(n):
        if visited[start]:
            continue
        visited[start] = True
        order: list[tuple[int, int, int]] = []  # (node, parent, bar id of parent edge)
        stack = [(start, -1, -1)]
        while stack:
            cur, parent, bar_id = stack.pop()
            order.append((cur, parent, bar_id))
            for nxt, edge_bar in adj[cur]:
                if nxt != parent and not visited[nxt]:
                    visited[nxt] = True
                    stack.append((nxt, cur, edge_bar))
        total = int(component_size[node_component[start]])
        for cur, parent, bar_id in reversed(order):
            if parent >= 0:
                subtree[parent] += subtree[cur]
                below = subtree[cur]
                ratios[bar_id] = (min(below, total - below), max(below, total - below))
    return ratios


def bar_metadata(barcode: Barcode, bar_id: int) -> Bar:
    """Populate (and cache) the bar's node subsets by cutting its MST edge."""
    bar = barcode.bar(bar_id)
    if bar.subset_u is not None:
        return bar
    g = barcode.wg.graph
    start = g.node_index(bar.cause_u)
    blocked = g.node_index(bar.cause_v)
    reached = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for nxt, edge_bar in barcode._mst_adj[cur]:
            if edge_bar == bar_id or nxt in reached:
                continue
            reached.add(nxt)
            queue.append(nxt)
    component_nodes = {
        i for i in range(len(g.nodes)) if _same_component(barcode, i, start)
    }
    other = component_nodes - reached
    assert blocked in other
    bar.subset_u = frozenset(g.nodes[i].id for i in reached)
    bar.subset_v = frozenset(g.nodes[i].id for i in other)
    counts = (len(reached), len(other))
    assert (min(counts), max(counts)) == bar.subset_ratio
    return bar


def _same_component(barcode: Barcode, a: int, b: int) -> bool:
    labels = _component_label_cache(barcode)
    return labels[a] == labels[b]


def _component_label_cache(barcode: Barcode) -> np.ndarray:
    labels = getattr(barcode, "_node_component", None)
    if labels is None:
        g = barcode.wg.graph
        n = len(g.nodes)
        labels = np.full(n, -1, dtype=np.int32)
        comp = 0
        for start in range(n):
            if labels[start] >= 0:
                continue
            labels[start] = comp
            queue = deque([start])
            while queue:
                cur = queue.popleft()
                for nxt, _ in barcode._mst_adj[cur]:
                    if labels[nxt] < 0:
                        labels[nxt] = comp
                        queue.append(nxt)
            comp += 1
        barcode._node_component = labels
    return labels


def sort_bars(barcode: Barcode) -> list[int]:
    """Display order, index 0 = bottom.

    Persistence measure ascending; ties ordered most-balanced first (50/50
    is more central to the MST); remaining ties by bar id.
    """
    return [
        bar.id
        for bar in sorted(
            barcode.bars, key=lambda b: (b.persistence_measure, -b.balance, b.id)
        )
    ]


def brute_force_barcode(metric: MetricMatrix) -> list[float]:
    """Union-of-balls filtration simulated directly from a metric matrix.

    Sweeps the ball diameter over all pairwise distances ascending and
    recounts thresholded-graph components from scratch at each value,
    recording every merge diameter. Deliberately shares no machinery with
    compute_barcode; oracle use only (<= 200 points).
    """
    d = metric.distances
    n = d.shape[0]
    if n > 200:
        raise ValueError("brute-force filtration is limited to 200 points")
    finite = d[np.isfinite(d) & (d > 0)]
    thresholds = np.unique(finite)
    deaths: list[float] = []
    previous = n

    def component_count(limit: float) -> int:
        unseen = np.ones(n, dtype=bool)
        count = 0
        for start in range(n):
            if not unseen[start]:
                continue
            count += 1
            unseen[start] = False
            queue = deque([start])
            while queue:
                cur = queue.popleft()
                reachable = np.nonzero(unseen & (d[cur] <= limit))[0]
                unseen[reachable] = False
                queue.extend(reachable.tolist())
        return count

    # Components never split, so once the fully-merged component count is
    # reached no further merges can occur.
    final = component_count(float(thresholds[-1])) if len(thresholds) else n
    for t in thresholds.tolist():
        if previous == final:
            break
        current = component_count(t)
        deaths.extend([t] * (previous - current))
        previous = current
    return deaths


def barcode_to_json(barcode: Barcode) -> dict:
    """Export schema: bars with persistence measure, cause pair, subset ratio."""
    return {
        "bars": [
            {
                "id": bar.id,
                "persistence": bar.persistence_measure,
                "cause": [bar.cause_u, bar.cause_v],
                "ratio": [bar.subset_ratio[0], bar.subset_ratio[1]],
            }
            for bar in barcode.bars
        ],
        "components": barcode.component_count,
    }
