"""Temporally coherent force-directed edge bundling (optional clutter control).

Follows the Holten/van-Wijk force-directed scheme: edges subdivide into
control points that feel springs along their own edge plus attraction to
corresponding points of compatible edges. Endpoints are re-pinned to the
live node positions on every step so bundling tracks the moving layout.
Auto-disabled above 500 edges.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph

MAX_BUNDLE_EDGES = 500
COMPATIBILITY_THRESHOLD = 0.05
# Published defaults of the cited method: cycle c doubles subdivision and
# halves the step while iterations shrink.
CYCLE_ITERATIONS = (50, 33, 22, 15, 10, 7)


@dataclass
class BundledEdge:
    edge_index: int
    control_points: np.ndarray  # (2**level + 1, 2); first/last pinned to nodes
    subdivision_level: int


@dataclass(frozen=True)
class BundlingResult:
    status: str  # "ok" | "refused_edge_count" | "off"
    bundles: list[BundledEdge] | None = None


def _segments(positions: np.ndarray, u: np.ndarray, v: np.ndarray):
    p0 = positions[u]
    p1 = positions[v]
    vec = p1 - p0
    length = np.hypot(vec[:, 0], vec[:, 1])
    mid = (p0 + p1) / 2.0
    return p0, p1, vec, length, mid


def compatibility(
    e1: tuple[int, int], e2: tuple[int, int], positions: np.ndarray
) -> float:
    """Product of angle, scale, position, and visibility terms, each in [0, 1]."""
    p0, p1 = positions[e1[0]], positions[e1[1]]
    q0, q1 = positions[e2[0]], positions[e2[1]]
    pv, qv = p1 - p0, q1 - q0
    lp, lq = float(np.hypot(*pv)), float(np.hypot(*qv))
    if lp == 0.0 or lq == 0.0:
        return 0.0
    l_avg = (lp + lq) / 2.0
    angle = abs(float(np.dot(pv, qv))) / (lp * lq)
    scale = 2.0 / (l_avg / min(lp, lq) + max(lp, lq) / l_avg)
    pm, qm = (p0 + p1) / 2.0, (q0 + q1) / 2.0
    position = l_avg / (l_avg + float(np.hypot(*(pm - qm))))

    def visibility(a0, a1, av, al, b0, b1):
        t0 = float(np.dot(b0 - a0, av)) / (al * al)
        t1 = float(np.dot(b1 - a0, av)) / (al * al)
        i0 = a0 + t0 * av
        i1 = a0 + t1 * av
        im = (i0 + i1) / 2.0
        il = float(np.hypot(*(i1 - i0)))
        if il == 0.0:
            return 0.0
        am = (a0 + a1) / 2.0
        return max(0.0, 1.0 - 2.0 * float(np.hypot(*(am - im))) / il)

    vis = min(visibility(p0, p1, pv, lp, q0, q1), visibility(q0, q1, qv, lq, p0, p1))
    return angle * scale * position * vis


def compatibility_matrix(
    positions: np.ndarray, u: np.ndarray, v: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """All-pairs compatibilities plus the orientation-flip mask, vectorized.

    flip[i, j] is True when edge j's control points must be traversed in
    reverse to correspond with edge i's.
    """
    p0, p1, vec, length, mid = _segments(positions, u, v)
    e = len(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        dot = vec @ vec.T
        angle = np.abs(dot) / np.outer(length, length)
        l_avg = (length[:, None] + length[None, :]) / 2.0
        lmin = np.minimum.outer(length, length)
        lmax = np.maximum.outer(length, length)
        scale = 2.0 / (l_avg / lmin + lmax / l_avg)
        mid_dist = np.hypot(
            mid[:, 0, None] - mid[None, :, 0], mid[:, 1, None] - mid[None, :, 1]
        )
        position = l_avg / (l_avg + mid_dist)

        # visibility of edge j from edge i: project j's endpoints onto line i
        len2 = length * length
        t0 = ((p0[None, :, :] - p0[:, None, :]) * vec[:, None, :]).sum(-1) / len2[:, None]
        t1 = ((p1[None, :, :] - p0[:, None, :]) * vec[:, None, :]).sum(-1) / len2[:, None]
        i0 = p0[:, None, :] + t0[..., None] * vec[:, None, :]
        i1 = p0[:, None, :] + t1[..., None] * vec[:, None, :]
        im = (i0 + i1) / 2.0
        il = np.hypot(i1[..., 0] - i0[..., 0], i1[..., 1] - i0[..., 1])
        am_im = np.hypot(mid[:, 0, None] - im[..., 0], mid[:, 1, None] - im[..., 1])
        vis_ij = np.where(il > 0, np.maximum(0.0, 1.0 - 2.0 * am_im / il), 0.0)
        vis = np.minimum(vis_ij, vis_ij.T)

        compat = angle * scale * position * vis
        compat = np.where(np.isfinite(compat), compat, 0.0)
    np.fill_diagonal(compat, 1.0)

    d_same = np.hypot(
        p0[:, 0, None] - p0[None, :, 0], p0[:, 1, None] - p0[None, :, 1]
    )
    d_same = np.minimum(
        d_same, np.hypot(p1[:, 0, None] - p1[None, :, 0], p1[:, 1, None] - p1[None, :, 1])
    )
    d_cross = np.hypot(p0[:, 0, None] - p1[None, :, 0], p0[:, 1, None] - p1[None, :, 1])
    d_cross = np.minimum(
        d_cross, np.hypot(p1[:, 0, None] - p0[None, :, 0], p1[:, 1, None] - p0[None, :, 1])
    )
    flip = d_same > d_cross
    zero_len = length == 0
    if np.any(zero_len):
        compat[zero_len, :] = 0.0
        compat[:, zero_len] = 0.0
    return compat, flip


def initialize_bundles(
    g: Graph, positions: np.ndarray, level: int = 0
) -> list[BundledEdge]:
    """Straight-line control polylines with 2**level - 1 interior points."""
    u, v = g.edge_index_arrays()
    bundles = []
    m = 2**level + 1
    ts = np.linspace(0.0, 1.0, m)[:, None]
    for i in range(len(g.edges)):
        a = positions[u[i]]
        b = positions[v[i]]
        bundles.append(
            BundledEdge(
                edge_index=i,
                control_points=a + ts * (b - a),
                subdivision_level=level,
            )
        )
    return bundles


def subdivide(bundles: list[BundledEdge]) -> list[BundledEdge]:
    """Double the subdivision by inserting segment midpoints."""
    out = []
    for b in bundles:
        cp = b.control_points
        mids = (cp[:-1] + cp[1:]) / 2.0
        merged = np.empty((cp.shape[0] + mids.shape[0], 2))
        merged[0::2] = cp
        merged[1::2] = mids
        out.append(
            BundledEdge(
                edge_index=b.edge_index,
                control_points=merged,
                subdivision_level=b.subdivision_level + 1,
            )
        )
    return out


def bundle_step(
    bundles: list[BundledEdge],
    positions: np.ndarray,
    u: np.ndarray,
    v: np.ndarray,
    stiffness: float = 0.1,
    step_size: float = 0.04,
    compat: np.ndarray | None = None,
    flip: np.ndarray | None = None,
) -> list[BundledEdge]:
    """One bundling iteration against the current node positions.

    Endpoints are re-pinned first; pass a precomputed (compat, flip) pair to
    amortize the O(E^2) compatibility evaluation across iterations of one
    cycle (positions snapshot unchanged).
    """
    for b in bundles:
        b.control_points[0] = positions[u[b.edge_index]]
        b.control_points[-1] = positions[v[b.edge_index]]
    if compat is None or flip is None:
        compat, flip = compatibility_matrix(positions, u, v)

    cps = np.stack([b.control_points for b in bundles])  # (E, m, 2)
    lengths = np.hypot(
        positions[u][:, 0] - positions[v][:, 0],
        positions[u][:, 1] - positions[v][:, 1],
    )
    m = cps.shape[1]
    if m <= 2:
        return bundles

    forces = np.zeros_like(cps)
    # springs toward neighboring control points on the same edge
    seg = np.diff(cps, axis=1)
    kp = stiffness / (np.maximum(lengths, 1e-12) * (m - 1))
    forces[:, 1:-1] = (seg[:, 1:] - seg[:, :-1]) * kp[:, None, None]

    # attraction to corresponding points of compatible edges
    pairs_i, pairs_j = np.nonzero(np.triu(compat > COMPATIBILITY_THRESHOLD, k=1))
    for i, j in zip(pairs_i.tolist(), pairs_j.tolist()):
        qj = cps[j, ::-1] if flip[i, j] else cps[j]
        delta = qj - cps[i]
        d2 = delta[:, 0] ** 2 + delta[:, 1] ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            attraction = np.where(d2[:, None] > 0, compat[i, j] * delta / d2[:, None], 0.0)
        forces[i, 1:-1] += attraction[1:-1]
        back = -attraction[::-1] if flip[i, j] else -attraction
        forces[j, 1:-1] += back[1:-1]

    disp = step_size * forces
    norms = np.hypot(disp[..., 0], disp[..., 1])
    over = norms > step_size
    if np.any(over):
        disp[over] *= (step_size / norms[over])[:, None]
    cps[:, 1:-1] += disp[:, 1:-1]
    for b, new in zip(bundles, cps):
        b.control_points = new
    return bundles


def run_bundling(
    g: Graph,
    positions: np.ndarray,
    stiffness: float = 0.1,
    initial_step: float | None = None,
) -> list[BundledEdge]:
    """Full bundling schedule: 6 cycles, doubling subdivision from level 1."""
    u, v = g.edge_index_arrays()
    if initial_step is None:
        span = positions.max(axis=0) - positions.min(axis=0) if len(positions) else [1, 1]
        initial_step = 0.01 * max(float(np.max(span)), 1.0)
    bundles = initialize_bundles(g, positions, level=0)
    compat, flip = compatibility_matrix(positions, u, v)
    step_size = initial_step
    for iterations in CYCLE_ITERATIONS:
        bundles = subdivide(bundles)
        for _ in range(iterations):
            bundle_step(bundles, positions, u, v, stiffness, step_size, compat, flip)
        step_size /= 2.0
    return bundles


def bundling_allowed(edge_count: int) -> bool:
    return edge_count <= MAX_BUNDLE_EDGES


def bundle_graph(g: Graph, positions: np.ndarray, mode: str = "auto") -> BundlingResult:
    """Bundle unless disabled; requests beyond the edge cap are refused with
    a status, never silently run."""
    if mode not in ("on", "off", "auto"):
        raise ValueError(f"unknown bundling mode {mode!r}")
    if mode == "off":
        return BundlingResult(status="off")
    if not bundling_allowed(len(g.edges)):
        if mode == "on":
            return BundlingResult(status="refused_edge_count")
        return BundlingResult(status="off")
    return BundlingResult(status="ok", bundles=run_bundling(g, positions))
