# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Barnes-Hut repulsion kernel.

Mirrors phlayout._kernels_py exactly (bucket quadtree, size/distance < theta
acceptance, zero-distance pairs skipped); this is the hot loop of every
layout step, so it lives in C.
"""
from libc.stdlib cimport free, malloc

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"

DEF LEAF_CAP = 12
DEF MAX_DEPTH = 48


cdef struct Node:
    double size
    double com_x
    double com_y
    double cell_x   # geometric cell center, for point-to-cell distance
    double cell_y
    int mass
    int child[4]
    int pt_start   # into perm when leaf
    int pt_count   # > 0 marks a leaf


cdef struct Tree:
    Node* nodes
    int n_nodes
    int capacity
    int* perm


cdef int _new_node(Tree* tree) noexcept nogil:
    cdef int idx = tree.n_nodes
    cdef int i
    cdef Node* grown
    if idx >= tree.capacity:
        tree.capacity = tree.capacity * 2
        grown = <Node*> malloc(tree.capacity * sizeof(Node))
        if grown == NULL:
            return -1
        for i in range(idx):
            grown[i] = tree.nodes[i]
        free(tree.nodes)
        tree.nodes = grown
    tree.n_nodes += 1
    return idx


cdef int _build(Tree* tree, const double* px, const double* py,
                int start, int count, double cx, double cy, double half,
                int depth, int* work) noexcept nogil:
    cdef int idx = _new_node(tree)
    if idx < 0:
        return -1
    # tree.nodes may move on realloc during child builds, so the node is
    # always addressed as tree.nodes[idx], never via a cached pointer.
    cdef double sx = 0.0, sy = 0.0
    cdef int i, p, q
    for i in range(start, start + count):
        p = tree.perm[i]
        sx += px[p]
        sy += py[p]
    tree.nodes[idx].size = 2.0 * half
    tree.nodes[idx].com_x = sx / count
    tree.nodes[idx].com_y = sy / count
    tree.nodes[idx].cell_x = cx
    tree.nodes[idx].cell_y = cy
    tree.nodes[idx].mass = count
    tree.nodes[idx].pt_start = start
    tree.nodes[idx].pt_count = 0
    for q in range(4):
        tree.nodes[idx].child[q] = -1
    if count <= LEAF_CAP or depth >= MAX_DEPTH:
        tree.nodes[idx].pt_count = count
        return idx

    # Stable counting partition of perm[start:start+count] into quadrants,
    # staged through the work array (quadrant recomputed per pass).
    cdef int counts[4]
    cdef int offsets[4]
    cdef int cursor[4]
    for q in range(4):
        counts[q] = 0
    for i in range(start, start + count):
        p = tree.perm[i]
        q = (1 if px[p] >= cx else 0) | (2 if py[p] >= cy else 0)
        counts[q] += 1
    offsets[0] = start
    for q in range(1, 4):
        offsets[q] = offsets[q - 1] + counts[q - 1]
    for q in range(4):
        cursor[q] = offsets[q]
    for i in range(start, start + count):
        p = tree.perm[i]
        q = (1 if px[p] >= cx else 0) | (2 if py[p] >= cy else 0)
        work[cursor[q]] = p
        cursor[q] += 1
    for i in range(start, start + count):
        tree.perm[i] = work[i]

    cdef double qhalf = half / 2.0
    cdef double qx, qy
    cdef int child_idx
    for q in range(4):
        if counts[q] == 0:
            continue
        qx = cx + (qhalf if q & 1 else -qhalf)
        qy = cy + (qhalf if q & 2 else -qhalf)
        child_idx = _build(tree, px, py, offsets[q], counts[q], qx, qy, qhalf,
                           depth + 1, work)
        if child_idx < 0:
            return -1
        tree.nodes[idx].child[q] = child_idx
    return idx


cdef void _eval_target(Tree* tree, const double* px, const double* py,
                       double x, double y, double theta2, int* stack,
                       double* out_fx, double* out_fy) noexcept nogil:
    cdef double fx = 0.0, fy = 0.0
    cdef double dx, dy, d2, size, ex, ey, outside2
    cdef int top = 0, ni, i, q
    cdef Node* node
    stack[top] = 0
    top += 1
    while top > 0:
        top -= 1
        ni = stack[top]
        node = &tree.nodes[ni]
        if node.pt_count > 0:
            for i in range(node.pt_start, node.pt_start + node.pt_count):
                dx = x - px[tree.perm[i]]
                dy = y - py[tree.perm[i]]
                d2 = dx * dx + dy * dy
                if d2 > 0.0:
                    fx += dx / d2
                    fy += dy / d2
            continue
        size = node.size
        ex = (x - node.cell_x if x > node.cell_x else node.cell_x - x) - size / 2.0
        ey = (y - node.cell_y if y > node.cell_y else node.cell_y - y) - size / 2.0
        if ex < 0.0: ex = 0.0
        if ey < 0.0: ey = 0.0
        outside2 = ex * ex + ey * ey
        dx = x - node.com_x
        dy = y - node.com_y
        d2 = dx * dx + dy * dy
        if d2 > 0.0 and size * size < theta2 * outside2:
            fx += node.mass * dx / d2
            fy += node.mass * dy / d2
        else:
            for q in range(4):
                if node.child[q] >= 0:
                    stack[top] = node.child[q]
                    top += 1
    out_fx[0] = fx
    out_fy[0] = fy


def repulsion(points, targets, double theta):
    """Sum of (t - p)/|t - p|^2 over source points p, per target t.

    Cells with size/distance < theta are aggregated at their center of mass;
    theta = 0 is the exact all-pairs sum; zero-distance pairs are skipped.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] pts = \
        np.ascontiguousarray(points, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] tgt = \
        np.ascontiguousarray(targets, dtype=np.float64)
    cdef int m = pts.shape[0]
    cdef int k = tgt.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] out = np.zeros((k, 2))
    if m == 0 or k == 0:
        return out

    cdef double xmin = pts[0, 0], xmax = pts[0, 0]
    cdef double ymin = pts[0, 1], ymax = pts[0, 1]
    cdef int i
    for i in range(1, m):
        if pts[i, 0] < xmin: xmin = pts[i, 0]
        if pts[i, 0] > xmax: xmax = pts[i, 0]
        if pts[i, 1] < ymin: ymin = pts[i, 1]
        if pts[i, 1] > ymax: ymax = pts[i, 1]
    cdef double cx = (xmin + xmax) / 2.0
    cdef double cy = (ymin + ymax) / 2.0
    cdef double half = (xmax - xmin if xmax - xmin > ymax - ymin else ymax - ymin) / 2.0
    half = half * 1.0000001 + 1e-12

    cdef Tree tree
    tree.capacity = 4 * (m // LEAF_CAP + 16)
    tree.n_nodes = 0
    tree.nodes = <Node*> malloc(tree.capacity * sizeof(Node))
    tree.perm = <int*> malloc(m * sizeof(int))
    cdef int* work = <int*> malloc(m * sizeof(int))
    if tree.nodes == NULL or tree.perm == NULL or work == NULL:
        free(tree.nodes); free(tree.perm); free(work)
        raise MemoryError()
    for i in range(m):
        tree.perm[i] = i

    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] xs = np.ascontiguousarray(pts[:, 0])
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] ys = np.ascontiguousarray(pts[:, 1])
    cdef const double* px = &xs[0]
    cdef const double* py = &ys[0]

    cdef int root
    with nogil:
        root = _build(&tree, px, py, 0, m, cx, cy, half, 0, work)
    if root < 0:
        free(tree.nodes); free(tree.perm); free(work)
        raise MemoryError()

    cdef int* stack = <int*> malloc((tree.n_nodes + 4) * sizeof(int))
    if stack == NULL:
        free(tree.nodes); free(tree.perm); free(work)
        raise MemoryError()
    cdef double theta2 = theta * theta
    cdef double fx, fy
    cdef int t
    with nogil:
        for t in range(k):
            _eval_target(&tree, px, py, tgt[t, 0], tgt[t, 1], theta2, stack,
                         &fx, &fy)
            out[t, 0] = fx
            out[t, 1] = fy

    free(stack)
    free(work)
    free(tree.perm)
    free(tree.nodes)
    return out
