#!/usr/bin/env python3
"""Regenerate the committed graph fixtures.

Needs networkx (dev-only dependency) for the Les Miserables co-occurrence
data; the barbell is constructed directly (two K50s joined by a 50-node
bridge path, 150 nodes / 2501 edges).
"""
from __future__ import annotations

import json
from itertools import combinations
from pathlib import Path

import networkx as nx

OUT = Path(__file__).resolve().parent.parent / "fixtures"


def lesmis() -> dict:
    g = nx.les_miserables_graph()
    nodes = [{"id": str(n)} for n in sorted(g.nodes())]
    edges = [
        {"source": str(u), "target": str(v), "weight": float(d["weight"])}
        for u, v, d in sorted(g.edges(data=True))
    ]
    return {"nodes": nodes, "edges": edges}


def barbell(clique: int = 50, bridge: int = 50) -> dict:
    names_a = [f"a{i:02d}" for i in range(clique)]
    names_b = [f"b{i:02d}" for i in range(clique)]
    names_p = [f"p{i:02d}" for i in range(bridge)]
    edges = []
    for group in (names_a, names_b):
        edges.extend({"source": u, "target": v} for u, v in combinations(group, 2))
    chain = [names_a[-1], *names_p, names_b[0]]
    edges.extend(
        {"source": u, "target": v} for u, v in zip(chain[:-1], chain[1:])
    )
    nodes = [{"id": n} for n in (*names_a, *names_p, *names_b)]
    return {"nodes": nodes, "edges": edges}


def main() -> None:
    OUT.mkdir(exist_ok=True)
    (OUT / "lesmis.json").write_text(json.dumps(lesmis(), indent=1))
    doc = barbell()
    (OUT / "barbell.json").write_text(json.dumps(doc, indent=1))
    print(f"lesmis: {len(lesmis()['nodes'])} nodes")
    print(f"barbell: {len(doc['nodes'])} nodes, {len(doc['edges'])} edges")


if __name__ == "__main__":
    main()
