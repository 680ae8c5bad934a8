"""Backend selection for the Barnes-Hut kernel plus the public repulsion op.

The compiled kernel (phlayout._kernels_c, Cython) is preferred; the pure
Python twin is the fallback. Set PHLAYOUT_PURE_PYTHON=1 to force the
fallback, e.g. for benchmarking one against the other.
"""
from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

if os.environ.get("PHLAYOUT_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels_c as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

KERNEL_BACKEND: str = _impl.BACKEND_NAME


def available_backends() -> dict[str, object]:
    """Importable kernel modules keyed by backend name."""
    backends: dict[str, object] = {_kernels_py.BACKEND_NAME: _kernels_py}
    try:
        from . import _kernels_c

        backends[_kernels_c.BACKEND_NAME] = _kernels_c
    except ImportError:
        pass
    return backends


def repulsion_raw(
    points: np.ndarray, targets: np.ndarray, theta: float, kernel=None
) -> np.ndarray:
    """Unit-strength Barnes-Hut sum; callers scale and accumulate."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must be in [0, 1]")
    return (kernel or _impl).repulsion(points, targets, theta)


def resolve_coincident(points: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Return positions with exact duplicates jittered by up to 1e-6.

    The input is never mutated; when all points are distinct it is returned
    as-is. Jitter draws come from the supplied generator, so callers seeding
    deterministically get deterministic forces.
    """
    if points.shape[0] < 2:
        return points
    # a (n,2) float64 row equals another iff the complex view matches;
    # 1-D unique here is several times faster than unique(axis=0)
    packed = np.ascontiguousarray(points, dtype=np.float64).view(np.complex128)[:, 0]
    _, inverse, counts = np.unique(packed, return_inverse=True, return_counts=True)
    if counts.max() < 2:
        return points
    duplicated = np.nonzero(counts[inverse] > 1)[0]
    jittered = points.copy()
    jittered[duplicated] += rng.uniform(-1e-6, 1e-6, size=(duplicated.size, 2))
    return jittered


def pairwise_repulsion(
    points: np.ndarray, theta: float, strength: float, seed: int = 0
) -> np.ndarray:
    """Per-point force strength * sum_j (p_i - p_j)/|p_i - p_j|^2.

    Coincident points are perturbed by seeded jitter before evaluation.
    """
    points = np.asarray(points, dtype=np.float64)
    pts = resolve_coincident(points, np.random.default_rng(seed))
    return strength * repulsion_raw(pts, pts, theta)
