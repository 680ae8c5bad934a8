"""Acceptance suite: one test per criterion, one printed PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines as they
print. A1's subset-ratio clause is expected to fail; the analysis lives in
the decisions ledger (the w=1 bar of the 4-node fixture cuts a leaf edge,
which no spanning tree can split 2:2 — the ratio belongs to the w=4 bar).
"""
from __future__ import annotations

import itertools
import json
import time
from contextlib import contextmanager

import numpy as np
import pytest
from scipy.cluster.hierarchy import linkage
from scipy.spatial.distance import squareform

from phlayout.analysis import (
    effect_metrics,
    greedy_modularity,
    weighted_modularity,
)
from phlayout.barcode import brute_force_barcode, compute_barcode
from phlayout.forces import KERNEL_BACKEND, repulsion_raw
from phlayout.graph import connected_components
from phlayout.layout import ForceConfig, Selection, init_layout, run
from phlayout.session import Session
from phlayout.weighting import (
    WeightedGraph,
    jaccard_weights,
    lengths_from_weights,
    shortest_path_metric,
)

from .conftest import (
    FOUR_NODE_EDGE_LIST,
    make_graph,
    random_connected_graph,
    random_graph,
)
from .test_weighting import brute_jaccard


@contextmanager
def criterion(name: str, description: str):
    try:
        yield
    except Exception:
        print(f"[{name}] FAIL — {description}", flush=True)
        raise
    print(f"[{name}] PASS — {description}", flush=True)


def test_a1_four_node_barcode_exactness(four_node_wg):
    with criterion("A1", "4-node example fixture: measures {4,3,1}, w=2 edge omitted, "
                         "w=1 bar ratio 2:2, < 1 ms"):
        elapsed = min(
            _timed(lambda: compute_barcode(four_node_wg))[1] for _ in range(5)
        )
        bc = compute_barcode(four_node_wg)
        assert sorted(b.persistence_measure for b in bc.bars) == [1.0, 3.0, 4.0]
        causes = {frozenset((b.cause_u, b.cause_v)) for b in bc.bars}
        assert frozenset(("v1", "v3")) not in causes
        assert elapsed < 1e-3, f"barcode took {elapsed*1e3:.3f} ms"
        (w1_bar,) = [b for b in bc.bars if b.persistence_measure == 1.0]
        (ratio22_bar,) = [b for b in bc.bars if b.subset_ratio == (2, 2)]
        assert w1_bar.subset_ratio == (2, 2), (
            f"w=1 bar has ratio {w1_bar.subset_ratio}; the (2,2) split belongs "
            f"to the w={ratio22_bar.persistence_measure:g} bar — unattainable "
            "as specified, see decisions ledger"
        )


def _timed(fn):
    t0 = time.perf_counter()
    result = fn()
    return result, time.perf_counter() - t0


def _single_linkage_heights(distances: np.ndarray) -> list[float]:
    if distances.shape[0] < 2:
        return []
    return sorted(linkage(squareform(distances, checks=False), "single")[:, 2].tolist())


def test_a2_oracle_equivalence():
    with criterion("A2", "200 random graphs: Kruskal deaths == union-of-balls "
                         "== single-linkage, zero mismatches, < 10 s"):
        rng = np.random.default_rng(2024)
        t0 = time.perf_counter()
        for trial in range(200):
            n = int(rng.integers(2, 13))
            wg = random_connected_graph(rng, n)
            metric = shortest_path_metric(wg)
            kruskal = sorted(b.death_length for b in compute_barcode(wg).bars)
            balls = sorted(brute_force_barcode(metric))
            dendro = _single_linkage_heights(metric.distances)
            assert kruskal == balls, f"trial {trial}: balls mismatch"
            assert kruskal == pytest.approx(dendro, abs=0, rel=0), (
                f"trial {trial}: dendrogram mismatch"
            )
        assert time.perf_counter() - t0 < 10.0


def test_a3_bar_count_law():
    with criterion("A3", "50 random graphs (disconnected included): "
                         "finite bars == |V| - components"):
        rng = np.random.default_rng(7)
        for trial in range(50):
            n = int(rng.integers(1, 40))
            g = random_graph(rng, n, float(rng.uniform(0.0, 0.3)))
            weights = rng.uniform(0.1, 5.0, size=len(g.edges))
            wg = WeightedGraph.from_weights(g, weights)
            bc = compute_barcode(wg)
            assert len(bc.bars) == len(g.nodes) - bc.component_count
            assert bc.component_count == len(connected_components(g))


def test_a4_barnes_hut_fidelity():
    with criterion("A4", f"theta=0 within 1e-9 on 50 points; theta=0.7 within "
                         f"5% per point on 1000 points; < 5 s ({KERNEL_BACKEND} kernel)"):
        t0 = time.perf_counter()

        def naive(points):
            delta = points[:, None, :] - points[None, :, :]
            d2 = (delta**2).sum(axis=-1)
            np.fill_diagonal(d2, 1.0)
            contrib = delta / d2[..., None]
            contrib[np.arange(len(points)), np.arange(len(points))] = 0.0
            return contrib.sum(axis=1)

        rng = np.random.default_rng(1)
        small = rng.normal(scale=10.0, size=(50, 2))
        exact = repulsion_raw(small, small, theta=0.0)
        expected = naive(small)
        rel = np.linalg.norm(exact - expected, axis=1) / np.linalg.norm(expected, axis=1)
        assert rel.max() < 1e-9

        rng = np.random.default_rng(2)
        big = rng.uniform(0, 100, size=(1000, 2))
        approx = repulsion_raw(big, big, theta=0.7)
        expected = naive(big)
        rel = np.linalg.norm(approx - expected, axis=1) / np.linalg.norm(expected, axis=1)
        assert rel.max() < 0.05, f"max per-point error {rel.max():.4f}"
        assert time.perf_counter() - t0 < 5.0


@pytest.fixture(scope="module")
def paper_scale_graph():
    rng = np.random.default_rng(99)
    n, m = 10_000, 100_000
    pairs = set()
    while len(pairs) < m:
        draw = rng.integers(0, n, size=(m, 2))
        for a, b in draw.tolist():
            if a != b:
                pairs.add((min(a, b), max(a, b)))
            if len(pairs) >= m:
                break
    edges = sorted(pairs)[:m]
    g = make_graph([(f"n{a:05d}", f"n{b:05d}") for a, b in edges],
                   nodes=[f"n{i:05d}" for i in range(n)])
    weights = rng.uniform(0.5, 5.0, size=len(g.edges))
    return WeightedGraph.from_weights(g, weights)


def test_a5_performance_budgets(paper_scale_graph):
    with criterion("A5", f"10k nodes / 100k edges: barcode <= 5 s, mean step "
                         f"<= 100 ms ({KERNEL_BACKEND} kernel)"):
        wg = paper_scale_graph
        bc, barcode_s = _timed(lambda: compute_barcode(wg))
        assert len(bc.bars) == len(wg.graph.nodes) - bc.component_count
        assert barcode_s <= 5.0, f"barcode took {barcode_s:.2f} s"

        state = init_layout(wg.graph, seed=1)
        for _ in range(3):  # warmup
            state = run(state, wg.graph, bc, None, ForceConfig(), 1)
        timed_steps = 20
        t0 = time.perf_counter()
        state = run(state, wg.graph, bc, None, ForceConfig(), timed_steps)
        mean_step_ms = (time.perf_counter() - t0) / timed_steps * 1000.0
        assert mean_step_ms <= 100.0, f"mean step {mean_step_ms:.1f} ms"
        print(f"    (barcode {barcode_s*1e3:.0f} ms, mean step {mean_step_ms:.1f} ms)")


@pytest.fixture(scope="module")
def barbell_pipeline(barbell_graph):
    wg = jaccard_weights(barbell_graph, hops=1)
    return barbell_graph, wg, compute_barcode(wg)


def test_a6_effect_metric_signs(barbell_pipeline):
    with criterion("A6", "barbell: repulsing the most balanced bar gives E_R > 0; "
                         "contracting below a mid threshold gives E_C > 0; < 60 s"):
        t0 = time.perf_counter()
        g, wg, bc = barbell_pipeline
        iterations = 3000
        config = ForceConfig()
        initial = init_layout(g, seed=42)
        source = run(initial, g, bc, Selection(), config, iterations)

        # most balanced bar, ties by higher persistence then id
        best = max(bc.bars, key=lambda b: (b.balance, b.persistence_measure, -b.id))
        repulse = Selection(repulsed_bars=frozenset({best.id}))
        target_r = run(initial, g, bc, repulse, config, iterations)
        report_r = effect_metrics(source.positions, target_r.positions, repulse, bc)
        assert report_r.e_r is not None and report_r.e_r > 0, f"E_R = {report_r.e_r}"

        measures = sorted(b.persistence_measure for b in bc.bars)
        mid = (measures[0] + measures[-1]) / 2.0
        contract = Selection(contraction_threshold=mid)
        assert any(b.persistence_measure < mid for b in bc.bars)
        target_c = run(initial, g, bc, contract, config, iterations)
        report_c = effect_metrics(source.positions, target_c.positions, contract, bc)
        assert report_c.e_c is not None and report_c.e_c > 0, f"E_C = {report_c.e_c}"
        assert report_c.e_r is None  # no repulsion active
        elapsed = time.perf_counter() - t0
        assert elapsed < 60.0, f"took {elapsed:.1f} s"
        print(f"    (E_R = {report_r.e_r:.3f}, E_C = {report_c.e_c:.3f}, {elapsed:.1f} s)")


def test_a7_determinism_replay():
    with criterion("A7", "identical seed + message script => bitwise-identical "
                         "frame sequences"):
        script = [
            {"kind": "load_graph", "text": FOUR_NODE_EDGE_LIST, "seed": 17},
            {"kind": "step_n", "n": 25},
            {"kind": "set_threshold", "value": 3.5},
            {"kind": "step_n", "n": 25},
            {"kind": "toggle_repulsion", "bar": 0},
            {"kind": "set_config", "config": {"barnes_hut_theta": 0.5}},
            {"kind": "step_n", "n": 25},
            {"kind": "snapshot_request"},
        ]

        def run_script() -> str:
            session = Session(seed=17)
            frames = []
            for msg in script:
                for reply in session.handle(msg):
                    if reply["reply"] == "frame":
                        frames.append(reply)
            return json.dumps(frames)

        first, second = run_script(), run_script()
        assert first == second


def test_a8_modularity_baseline(two_triangles):
    with criterion("A8", "greedy 2-cut == exhaustive optimum on the triangle "
                         "fixture; incremental Q_w within 1e-9 on 30 graphs"):
        wg = lengths_from_weights(two_triangles)
        hierarchy = greedy_modularity(wg)
        labels = hierarchy.cut(2)
        greedy_q = weighted_modularity(wg, labels)

        n = len(wg.graph.nodes)
        best_q = -np.inf
        for assignment in itertools.product([0, 1], repeat=n - 1):
            candidate = np.array((0,) + assignment)
            if candidate.max() == 0:
                continue
            best_q = max(best_q, weighted_modularity(wg, candidate))
        assert greedy_q == pytest.approx(best_q, abs=1e-12)
        groups = {frozenset(np.nonzero(labels == c)[0].tolist()) for c in (0, 1)}
        ids = wg.graph.node_ids
        assert {frozenset(ids[i] for i in grp) for grp in groups} == {
            frozenset("abc"),
            frozenset("def"),
        }

        rng = np.random.default_rng(55)
        for trial in range(30):
            size = int(rng.integers(4, 20))
            rand_wg = random_connected_graph(rng, size)
            h = greedy_modularity(rand_wg)
            assert len(h.merges) == size - 1
            for idx, merge in enumerate(h.merges):
                from_scratch = weighted_modularity(rand_wg, h.cut(size - idx - 1))
                assert abs(merge.q_after - from_scratch) <= 1e-9


def test_a9_jaccard_pipeline(barbell_pipeline):
    with criterion("A9", "unweighted barbell at 1 hop: bridge-adjacent bars sit "
                         "strictly below intra-clique bars (oracle-checked)"):
        g, wg, bc = barbell_pipeline

        def is_bridge_node(node_id: str) -> bool:
            return node_id.startswith("p")

        bridge_bars = [
            b for b in bc.bars
            if is_bridge_node(b.cause_u) or is_bridge_node(b.cause_v)
        ]
        clique_bars = [
            b for b in bc.bars
            if not is_bridge_node(b.cause_u) and not is_bridge_node(b.cause_v)
        ]
        assert bridge_bars and clique_bars
        assert max(b.persistence_measure for b in bridge_bars) < min(
            b.persistence_measure for b in clique_bars
        )
        # brute-force neighborhood oracle confirms the weights behind the bars
        rng = np.random.default_rng(0)
        sample = rng.choice(len(g.edges), size=40, replace=False)
        for idx in sample.tolist():
            e = g.edges[idx]
            expected = max(brute_jaccard(g, e.source, e.target, 1), 1e-6)
            assert wg.weights[idx] == pytest.approx(expected)
        bridge_w = [
            w for e, w in zip(g.edges, wg.weights)
            if is_bridge_node(e.source) or is_bridge_node(e.target)
        ]
        clique_w = [
            w for e, w in zip(g.edges, wg.weights)
            if not is_bridge_node(e.source) and not is_bridge_node(e.target)
        ]
        assert max(bridge_w) < min(clique_w)
