#!/usr/bin/env python3
"""Benchmark the compiled Barnes-Hut kernel against the pure-Python fallback
(and the naive all-pairs sum as a reference) plus a full layout step.

Usage: python benchmarks/bench_kernels.py [--sizes 500,2000,10000]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from phlayout.forces import available_backends
from phlayout.layout import ForceConfig, init_layout, step

THETA = 0.7


def naive(points: np.ndarray) -> np.ndarray:
    delta = points[:, None, :] - points[None, :, :]
    d2 = (delta**2).sum(axis=-1)
    np.fill_diagonal(d2, 1.0)
    contrib = delta / d2[..., None]
    contrib[np.arange(len(points)), np.arange(len(points))] = 0.0
    return contrib.sum(axis=1)


def best_of(fn, repeats: int = 3) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_kernels(sizes: list[int]) -> None:
    backends = available_backends()
    print(f"Barnes-Hut repulsion, theta={THETA} (best of 3, milliseconds)")
    header = f"{'n':>8} | " + " | ".join(f"{name:>10}" for name in backends)
    if "compiled" in backends and "python" in backends:
        header += " |    speedup"
    header += f" | {'naive numpy':>11}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        rng = np.random.default_rng(n)
        pts = rng.uniform(0, 100, size=(n, 2))
        row = f"{n:>8} | "
        times = {}
        for name, kernel in backends.items():
            times[name] = best_of(lambda: kernel.repulsion(pts, pts, THETA))
            row += f"{times[name]*1e3:>10.2f} | "
        if "compiled" in times and "python" in times:
            row += f"{times['python']/times['compiled']:>9.1f}x | "
        if n <= 5000:
            row += f"{best_of(lambda: naive(pts))*1e3:>11.2f}"
        else:
            row += f"{'-':>11}"
        print(row)


def bench_step(n: int = 10_000, m: int = 100_000) -> None:
    import phlayout.forces
    from phlayout.graph import build_graph

    rng = np.random.default_rng(1)
    pairs = set()
    while len(pairs) < m:
        a, b = rng.integers(0, n, size=2).tolist()
        if a != b:
            pairs.add((min(a, b), max(a, b)))
    g = build_graph(
        [(f"n{i}", None) for i in range(n)],
        [(f"n{a}", f"n{b}", None) for a, b in sorted(pairs)],
    )
    print(f"\nFull layout step, {n} nodes / {m} edges (best of 3):")
    original = phlayout.forces._impl
    try:
        for name, kernel in available_backends().items():
            phlayout.forces._impl = kernel
            s = init_layout(g, 1)
            s = step(s, g)
            elapsed = best_of(lambda: step(s, g), repeats=3)
            print(f"  {name:>10}: {elapsed*1e3:8.1f} ms/step")
    finally:
        phlayout.forces._impl = original


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="500,2000,10000")
    parser.add_argument("--skip-step", action="store_true")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    bench_kernels(sizes)
    if not args.skip_step:
        bench_step()


if __name__ == "__main__":
    main()
