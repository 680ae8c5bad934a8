"""Deterministic static SVG rendering: halos under edges under nodes."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .bundling import BundledEdge
from .graph import Graph, degree_color_scale

# matplotlib tab10
DEFAULT_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


@dataclass(frozen=True)
class StyleSpec:
    node_radius: float = 4.0
    palette: tuple[str, ...] = DEFAULT_PALETTE
    degree_endpoints: tuple[str, str] = ("#bdd7e7", "#08519c")  # low, high
    halo_colors: tuple[str, str] = ("#6baed6", "#9e9ac8")  # the two subset sides
    edge_opacity: float = 0.4

    def __post_init__(self):
        if not self.palette:
            raise ValueError("palette must be non-empty")
        if self.node_radius <= 0:
            raise ValueError("node_radius must be positive")

    @classmethod
    def from_json(cls, text: str) -> "StyleSpec":
        doc = json.loads(text)
        kwargs = {}
        for key in ("node_radius", "edge_opacity"):
            if key in doc:
                kwargs[key] = float(doc[key])
        for key in ("palette", "degree_endpoints", "halo_colors"):
            if key in doc:
                kwargs[key] = tuple(doc[key])
        return cls(**kwargs)


def _hex_to_rgb(color: str) -> tuple[int, int, int]:
    color = color.lstrip("#")
    return tuple(int(color[i : i + 2], 16) for i in (0, 2, 4))  # type: ignore[return-value]


def _lerp_color(low: str, high: str, t: float) -> str:
    lo, hi = _hex_to_rgb(low), _hex_to_rgb(high)
    mixed = tuple(round(a + (b - a) * t) for a, b in zip(lo, hi))
    return "#{:02x}{:02x}{:02x}".format(*mixed)


def _node_colors(g: Graph, style: StyleSpec) -> dict[str, str]:
    categories = [n.category for n in g.nodes if n.category is not None]
    if categories:
        order: dict[str, int] = {}
        for n in g.nodes:
            if n.category is not None and n.category not in order:
                order[n.category] = len(order)
        fallback = style.palette[-1]
        return {
            n.id: style.palette[order[n.category] % len(style.palette)]
            if n.category is not None
            else fallback
            for n in g.nodes
        }
    scale = degree_color_scale(g) if g.nodes else {}
    lo, hi = style.degree_endpoints
    return {node_id: _lerp_color(lo, hi, t) for node_id, t in scale.items()}


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def render_svg(
    g: Graph,
    positions,
    style: StyleSpec = StyleSpec(),
    bundles: list[BundledEdge] | None = None,
    halo_membership: dict[str, int] | None = None,
) -> str:
    """Render the layout as SVG text; identical inputs give identical bytes.

    ``positions`` is either an (n, 2) array in graph node order or a mapping
    node id -> (x, y). ``halo_membership`` maps node ids to side 0 or 1,
    drawn as colored discs under the nodes.
    """
    if isinstance(positions, np.ndarray):
        if positions.shape[0] != len(g.nodes):
            raise ValueError("positions array does not cover all nodes")
        coords = {n.id: (float(positions[i, 0]), float(positions[i, 1]))
                  for i, n in enumerate(g.nodes)}
    else:
        coords = {}
        for n in g.nodes:
            if n.id not in positions:
                raise ValueError(f"missing position for node {n.id!r}")
            x, y = positions[n.id]
            coords[n.id] = (float(x), float(y))

    if coords:
        xs = [p[0] for p in coords.values()]
        ys = [p[1] for p in coords.values()]
        margin = 0.05 * max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
        x0, y0 = min(xs) - margin, min(ys) - margin
        width = (max(xs) - min(xs)) + 2 * margin
        height = (max(ys) - min(ys)) + 2 * margin
    else:
        x0 = y0 = 0.0
        width = height = 1.0

    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(width)} {_fmt(height)}" '
        f'width="800" height="{_fmt(800 * height / width)}">'
    ]

    if halo_membership:
        halo_radius = 2.5 * style.node_radius
        for n in g.nodes:
            if n.id not in halo_membership:
                continue
            side = halo_membership[n.id]
            x, y = coords[n.id]
            parts.append(
                f'<circle class="halo" cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(halo_radius)}" '
                f'fill="{style.halo_colors[side % 2]}" fill-opacity="0.45"/>'
            )

    if bundles is not None:
        by_index = {b.edge_index: b for b in bundles}
        for i in range(len(g.edges)):
            cp = by_index[i].control_points
            d = "M " + " L ".join(f"{_fmt(px)} {_fmt(py)}" for px, py in cp)
            parts.append(
                f'<path d="{d}" fill="none" stroke="#555555" '
                f'stroke-opacity="{style.edge_opacity}" stroke-width="1"/>'
            )
    else:
        for e in g.edges:
            x1, y1 = coords[e.source]
            x2, y2 = coords[e.target]
            parts.append(
                f'<path d="M {_fmt(x1)} {_fmt(y1)} L {_fmt(x2)} {_fmt(y2)}" fill="none" '
                f'stroke="#555555" stroke-opacity="{style.edge_opacity}" stroke-width="1"/>'
            )

    colors = _node_colors(g, style)
    for n in g.nodes:
        x, y = coords[n.id]
        parts.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(style.node_radius)}" '
            f'fill="{colors[n.id]}" stroke="#333333" stroke-width="0.5"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
