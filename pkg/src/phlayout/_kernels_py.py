"""Pure-Python Barnes-Hut repulsion kernel (fallback backend).

Same bucket-quadtree algorithm as the compiled kernel in _kernels_c.pyx;
kept dependency-free so the package works without a C toolchain. Selected
automatically when the compiled module is missing (see phlayout.forces).
"""
from __future__ import annotations

import numpy as np

LEAF_CAP = 12
MAX_DEPTH = 48

BACKEND_NAME = "python"

# node layout: [size, com_x, com_y, mass, children | None, point_ids | None,
#               cell_center_x, cell_center_y]
_SIZE, _COMX, _COMY, _MASS, _CHILDREN, _POINTS, _CX, _CY = range(8)


def _build(points: np.ndarray):
    m = points.shape[0]
    xs = points[:, 0]
    ys = points[:, 1]
    cx = (xs.min() + xs.max()) / 2.0
    cy = (ys.min() + ys.max()) / 2.0
    half = max(xs.max() - xs.min(), ys.max() - ys.min()) / 2.0
    half = half * 1.0000001 + 1e-12  # keep boundary points strictly inside
    nodes: list[list] = []
    px = xs.tolist()
    py = ys.tolist()

    def build(ids: list[int], ccx: float, ccy: float, chalf: float, depth: int) -> int:
        count = len(ids)
        sx = 0.0
        sy = 0.0
        for i in ids:
            sx += px[i]
            sy += py[i]
        node = [2.0 * chalf, sx / count, sy / count, count, None, None, ccx, ccy]
        idx = len(nodes)
        nodes.append(node)
        if count <= LEAF_CAP or depth >= MAX_DEPTH:
            node[_POINTS] = ids
            return idx
        quads: tuple[list[int], ...] = ([], [], [], [])
        for i in ids:
            q = (1 if px[i] >= ccx else 0) | (2 if py[i] >= ccy else 0)
            quads[q].append(i)
        qhalf = chalf / 2.0
        children = []
        for q, sub in enumerate(quads):
            if not sub:
                continue
            qx = ccx + (qhalf if q & 1 else -qhalf)
            qy = ccy + (qhalf if q & 2 else -qhalf)
            children.append(build(sub, qx, qy, qhalf, depth + 1))
        node[_CHILDREN] = children
        return idx

    build(list(range(m)), cx, cy, half, 0)
    return nodes, px, py


def repulsion(points: np.ndarray, targets: np.ndarray, theta: float) -> np.ndarray:
    """Sum of (t - p)/|t - p|^2 over source points p, per target t.

    A cell is taken as an aggregate at its center of mass when
    size / distance(t, cell) < theta, with the distance measured to the cell
    region itself (conservative: never closer than the center of mass);
    theta = 0 degenerates to the exact all-pairs sum. Zero-distance pairs
    contribute nothing (this is what excludes self-interaction when targets
    are the source points themselves).
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    targets = np.ascontiguousarray(targets, dtype=np.float64)
    k = targets.shape[0]
    out = np.zeros((k, 2), dtype=np.float64)
    if points.shape[0] == 0 or k == 0:
        return out
    nodes, px, py = _build(points)
    theta2 = theta * theta
    tx = targets[:, 0].tolist()
    ty = targets[:, 1].tolist()
    for t in range(k):
        x = tx[t]
        y = ty[t]
        fx = 0.0
        fy = 0.0
        stack = [0]
        while stack:
            node = nodes[stack.pop()]
            pts = node[_POINTS]
            if pts is not None:
                for i in pts:
                    dx = x - px[i]
                    dy = y - py[i]
                    d2 = dx * dx + dy * dy
                    if d2 > 0.0:
                        fx += dx / d2
                        fy += dy / d2
                continue
            size = node[_SIZE]
            ex = abs(x - node[_CX]) - size / 2.0
            ey = abs(y - node[_CY]) - size / 2.0
            outside2 = (ex if ex > 0.0 else 0.0) ** 2 + (ey if ey > 0.0 else 0.0) ** 2
            dx = x - node[_COMX]
            dy = y - node[_COMY]
            d2 = dx * dx + dy * dy
            if d2 > 0.0 and size * size < theta2 * outside2:
                mass = node[_MASS]
                fx += mass * dx / d2
                fy += mass * dy / d2
            else:
                stack.extend(node[_CHILDREN])
        out[t, 0] = fx
        out[t, 1] = fy
    return out
