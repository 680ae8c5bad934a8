"""Layout-quality measures (contraction/repulsion effect via the persistence
of the embedded point cloud) and the greedy weighted-modularity clustering
baseline with cluster-aware spring rest lengths."""
from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .barcode import Barcode, bar_metadata
from .graph import Graph, component_labels
from .layout import Selection
from .weighting import WeightedGraph


# ---------------------------------------------------------------------------
# Effect of contraction / repulsion on the embedded node cloud
# ---------------------------------------------------------------------------

def _euclidean_mst_edges(points: np.ndarray) -> list[tuple[int, int, float]]:
    """Prim's algorithm on the complete Euclidean graph, O(k^2)."""
    k = points.shape[0]
    in_tree = np.zeros(k, dtype=bool)
    in_tree[0] = True
    d = np.hypot(points[:, 0] - points[0, 0], points[:, 1] - points[0, 1])
    attach = np.zeros(k, dtype=np.intp)
    edges: list[tuple[int, int, float]] = []
    for _ in range(k - 1):
        d_masked = np.where(in_tree, np.inf, d)
        nxt = int(np.argmin(d_masked))
        edges.append((int(attach[nxt]), nxt, float(d[nxt])))
        in_tree[nxt] = True
        nd = np.hypot(points[:, 0] - points[nxt, 0], points[:, 1] - points[nxt, 1])
        closer = nd < d
        d = np.where(closer, nd, d)
        attach = np.where(closer, nxt, attach)
    return edges


def layout_persistence(barcode: Barcode, bar_id: int, positions: np.ndarray) -> float:
    """Single-linkage merge distance between the bar's two node subsets in the
    embedded (Euclidean) point cloud of the bar's component.

    Equals the dendrogram height at which a cluster first contains points
    from both subsets; for leaf splits this is just the distance between the
    two nodes.
    """
    bar = bar_metadata(barcode, bar_id)
    g = barcode.wg.graph
    idx = sorted(g.node_index(i) for i in bar.subset_u | bar.subset_v)
    if len(idx) < 2:
        raise ValueError("component has fewer than 2 nodes")
    side_u = np.array([g.nodes[i].id in bar.subset_u for i in idx])
    points = positions[idx]

    edges = sorted(_euclidean_mst_edges(points), key=lambda e: e[2])
    parent = list(range(len(idx)))
    has_u = side_u.copy()
    has_v = ~side_u

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b, dist in edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        parent[rb] = ra
        has_u[ra] = has_u[ra] or has_u[rb]
        has_v[ra] = has_v[ra] or has_v[rb]
        if has_u[ra] and has_v[ra]:
            return dist
    raise AssertionError("subsets never met; inconsistent bar metadata")


@dataclass(frozen=True)
class EffectReport:
    e_c: float | None  # mean relative contraction effect, absent if no C bars
    e_r: float | None
    per_bar: dict[int, tuple[float, float]]  # bar id -> (P_S, P_T)
    excluded: frozenset[int]  # bars with P_S = 0, skipped and flagged

    def to_json(self) -> dict:
        bars = []
        for bar_id in sorted(self.per_bar):
            p_s, p_t = self.per_bar[bar_id]
            entry: dict = {"id": bar_id, "P_S": p_s, "P_T": p_t}
            if bar_id in self.excluded:
                entry["excluded"] = True
            bars.append(entry)
        return {"E_C": self.e_c, "E_R": self.e_r, "bars": bars}


def effect_metrics(
    source_positions: np.ndarray,
    target_positions: np.ndarray,
    selection: Selection,
    barcode: Barcode,
) -> EffectReport:
    """E_C = mean (P_S-P_T)/P_S over threshold-contracted bars,
    E_R = mean (P_T-P_S)/P_S over repulsed bars; positive is desirable."""
    contracted = [
        bar.id
        for bar in barcode.bars
        if bar.persistence_measure < selection.contraction_threshold
    ]
    repulsed = sorted(selection.repulsed_bars)
    per_bar: dict[int, tuple[float, float]] = {}
    excluded = set()
    for bar_id in {*contracted, *repulsed}:
        p_s = layout_persistence(barcode, bar_id, source_positions)
        p_t = layout_persistence(barcode, bar_id, target_positions)
        per_bar[bar_id] = (p_s, p_t)
        if p_s == 0.0:
            excluded.add(bar_id)

    def mean_effect(bar_ids: list[int], sign: float) -> float | None:
        usable = [b for b in bar_ids if b not in excluded]
        if not usable:
            return None
        total = 0.0
        for b in usable:
            p_s, p_t = per_bar[b]
            total += sign * (p_s - p_t) / p_s
        return total / len(usable)

    return EffectReport(
        e_c=mean_effect(contracted, 1.0),
        e_r=mean_effect(repulsed, -1.0),
        per_bar=per_bar,
        excluded=frozenset(excluded),
    )


# ---------------------------------------------------------------------------
# Greedy weighted-modularity clustering baseline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Merge:
    a: int  # cluster ids; leaves are node indices, merge t creates id n + t
    b: int
    delta_q: float
    q_after: float


@dataclass
class ClusterHierarchy:
    n_nodes: int
    merges: list[Merge]
    component_count: int

    def cut(self, k: int) -> np.ndarray:
        """Cluster labels (0..k-1, ordered by smallest member node) after
        undoing merges down to k clusters."""
        if k < self.component_count or k > max(self.n_nodes, 1):
            raise ValueError(
                f"k must be in [{self.component_count}, {self.n_nodes}], got {k}"
            )
        n_merges = self.n_nodes - k
        parent: dict[int, int] = {}
        for t, merge in enumerate(self.merges[:n_merges]):
            parent[merge.a] = self.n_nodes + t
            parent[merge.b] = self.n_nodes + t

        def find(x: int) -> int:
            while x in parent:
                x = parent[x]
            return x

        roots: dict[int, int] = {}
        labels = np.empty(self.n_nodes, dtype=np.int32)
        for node in range(self.n_nodes):
            root = find(node)
            if root not in roots:
                roots[root] = len(roots)
            labels[node] = roots[root]
        return labels


def weighted_modularity(wg: WeightedGraph, labels: np.ndarray) -> float:
    """From-scratch Q_w: (1/2w_s) sum_ij [w_ij - w_i w_j / 2w_s] delta(c_i, c_j),
    summed over ordered pairs including the i = j null-model terms."""
    g = wg.graph
    n = len(g.nodes)
    norm = 2.0 * float(np.sum(wg.weights))
    if norm == 0.0:
        return 0.0
    strength = np.zeros(n)
    u, v = g.edge_index_arrays()
    for a, b, w in zip(u.tolist(), v.tolist(), wg.weights.tolist()):
        strength[a] += w
        strength[b] += w
    intra = 0.0
    for a, b, w in zip(u.tolist(), v.tolist(), wg.weights.tolist()):
        if labels[a] == labels[b]:
            intra += 2.0 * w  # ordered pairs
    null = 0.0
    for cluster in np.unique(labels):
        s = float(strength[labels == cluster].sum())
        null += s * s
    return (intra - null / norm) / norm


def greedy_modularity(wg: WeightedGraph) -> ClusterHierarchy:
    """Agglomerate by the largest Q_w increase at each step (ties by smallest
    cluster-id pair); merges stay within connected components."""
    g = wg.graph
    n = len(g.nodes)
    comp_of_node = component_labels(g)
    norm = 2.0 * float(np.sum(wg.weights))

    strength: dict[int, float] = {i: 0.0 for i in range(n)}
    e: dict[tuple[int, int], float] = {}
    nbrs: dict[int, set[int]] = {i: set() for i in range(n)}
    u, v = g.edge_index_arrays()
    for a, b, w in zip(u.tolist(), v.tolist(), wg.weights.tolist()):
        nw = w / norm
        strength[a] += nw
        strength[b] += nw
        key = (a, b) if a < b else (b, a)
        e[key] = e.get(key, 0.0) + nw
        nbrs[a].add(b)
        nbrs[b].add(a)

    comp: dict[int, int] = {i: int(comp_of_node[i]) for i in range(n)}
    alive_by_comp: dict[int, set[int]] = {}
    for i in range(n):
        alive_by_comp.setdefault(comp[i], set()).add(i)
    component_count = len(alive_by_comp)
    alive: set[int] = set(range(n))

    def dq_of(i: int, j: int) -> float:
        key = (i, j) if i < j else (j, i)
        return 2.0 * (e.get(key, 0.0) - strength[i] * strength[j])

    heap: list[tuple[float, int, int]] = []
    for (a, b), _ in e.items():
        heapq.heappush(heap, (-dq_of(a, b), a, b))

    def best_adjacent() -> tuple[float, int, int] | None:
        while heap:
            neg_dq, a, b = heap[0]
            if a in alive and b in alive and (a, b) in e and -dq_of(a, b) == neg_dq:
                return (-neg_dq, a, b)
            heapq.heappop(heap)
        return None

    def best_nonadjacent() -> tuple[float, int, int] | None:
        best: tuple[float, int, int] | None = None
        for members in alive_by_comp.values():
            if len(members) < 3:
                continue
            ordered = sorted(members, key=lambda c: (strength[c], c))
            floor = ordered[0]
            for ii, ci in enumerate(ordered):
                if best is not None and strength[ci] * strength[floor] > -best[0] / 2.0:
                    break
                for cj in ordered[ii + 1:]:
                    product = strength[ci] * strength[cj]
                    if best is not None and product > -best[0] / 2.0:
                        break
                    if cj in nbrs[ci]:
                        continue
                    dq = -2.0 * product
                    pair = (min(ci, cj), max(ci, cj))
                    if (
                        best is None
                        or dq > best[0]
                        or (dq == best[0] and pair < (best[1], best[2]))
                    ):
                        best = (dq, pair[0], pair[1])
        return best

    q = -sum(s * s for s in strength.values()) if norm else 0.0
    merges: list[Merge] = []
    remaining = sum(len(m) - 1 for m in alive_by_comp.values())
    next_id = n
    while remaining > 0:
        chosen = best_adjacent()
        assert chosen is not None, "a splittable component must have a crossing edge"
        if chosen[0] <= 0.0:
            na = best_nonadjacent()
            if na is not None and (
                na[0] > chosen[0]
                or (na[0] == chosen[0] and (na[1], na[2]) < (chosen[1], chosen[2]))
            ):
                chosen = na
        dq, a, b = chosen
        c = next_id
        next_id += 1
        q += dq
        merges.append(Merge(a=min(a, b), b=max(a, b), delta_q=dq, q_after=q))

        key = (a, b) if a < b else (b, a)
        e.pop(key, None)
        nbrs[a].discard(b)
        nbrs[b].discard(a)
        strength[c] = strength[a] + strength[b]
        nbrs[c] = set()
        for old in (a, b):
            for x in nbrs[old]:
                old_key = (old, x) if old < x else (x, old)
                val = e.pop(old_key)
                new_key = (c, x) if c < x else (x, c)
                e[new_key] = e.get(new_key, 0.0) + val
                nbrs[x].discard(old)
                nbrs[x].add(c)
                nbrs[c].add(x)
            del strength[old], nbrs[old]
            alive.discard(old)
        for x in nbrs[c]:
            heapq.heappush(heap, (-dq_of(c, x), min(c, x), max(c, x)))
        alive.add(c)
        comp[c] = comp[a]
        members = alive_by_comp[comp[c]]
        members.discard(a)
        members.discard(b)
        members.add(c)
        for old in (a, b):
            comp.pop(old, None)
        remaining -= 1

    return ClusterHierarchy(
        n_nodes=n,
        merges=merges,
        component_count=component_count if n else 0,
    )


def cluster_rest_lengths(
    hierarchy: ClusterHierarchy,
    g: Graph,
    k: int,
    base_length: float,
    multiplier: float = 4.0,
) -> np.ndarray:
    """Per-edge spring rest lengths: intra-cluster edges keep the base length,
    inter-cluster edges are stretched by the multiplier."""
    labels = hierarchy.cut(k)
    u, v = g.edge_index_arrays()
    same = labels[u] == labels[v]
    return np.where(same, base_length, multiplier * base_length)
