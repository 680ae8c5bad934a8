"""Session engine: drives the live simulation and speaks the message protocol.

The engine itself is synchronous and deterministic — handle() processes one
message between steps, tick() advances one step and emits one frame — so a
recorded message script replays bit-identically. The socket server in
phlayout.server wraps this with a real intake queue and frame pacing.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import layout as layout_mod
from .analysis import effect_metrics
from .barcode import Barcode, bar_metadata, barcode_to_json, compute_barcode, sort_bars
from .graph import Graph, GraphFormatError, parse_graph
from .layout import ForceConfig, LayoutState, Selection
from .weighting import WeightedGraph, weigh_graph

DEFAULT_SEED = 42

BUNDLING_EDGE_LIMIT = 500
HALO_NODE_LIMIT = 100

CLIENT_KINDS = (
    "load_graph",
    "set_config",
    "set_threshold",
    "toggle_repulsion",
    "hover_bar",
    "play",
    "pause",
    "step_n",
    "snapshot_request",
)


@dataclass(frozen=True)
class FeatureFlags:
    bundling_enabled: bool
    halo_mode: bool  # True: halo previews; False: hull-outline previews

    def to_json(self) -> dict:
        return {"bundling_enabled": self.bundling_enabled, "halo_mode": self.halo_mode}


def feature_gate(node_count: int, edge_count: int) -> FeatureFlags:
    """Interactivity gates: bundling off above 500 edges, halo previews
    replace hull outlines above 100 nodes."""
    return FeatureFlags(
        bundling_enabled=edge_count <= BUNDLING_EDGE_LIMIT,
        halo_mode=node_count > HALO_NODE_LIMIT,
    )


def default_seed() -> int:
    env = os.environ.get("PHLAYOUT_SEED")
    if env:
        return int(env)
    return DEFAULT_SEED


class SessionError(Exception):
    """Protocol-level error; becomes an error reply, the session survives."""


class Session:
    """One graph, one simulation loop, one selection."""

    def __init__(self, seed: int | None = None, default_graph_path: str | None = None):
        self.seed = default_seed() if seed is None else seed
        self.default_graph_path = default_graph_path
        self.graph: Graph | None = None
        self.wg: WeightedGraph | None = None
        self.barcode: Barcode | None = None
        self.bar_order: list[int] = []
        self.config = ForceConfig()
        self.selection = Selection()
        self.state: LayoutState | None = None
        self.features: FeatureFlags | None = None
        self.playing = False
        self.frame_counter = 0
        self.source_positions: np.ndarray | None = None

    # -- message dispatch -----------------------------------------------------

    def handle(self, msg) -> list[dict]:
        """Process one client message; the last reply is always ack or error."""
        msg_id = msg.get("id") if isinstance(msg, dict) else None
        try:
            if not isinstance(msg, dict) or "kind" not in msg:
                raise SessionError("message must be an object with a 'kind'")
            kind = msg["kind"]
            if kind not in CLIENT_KINDS:
                raise SessionError(f"unknown message kind {kind!r}")
            if kind != "load_graph" and self.graph is None:
                raise SessionError("no graph loaded")
            replies, ack_data = getattr(self, f"_handle_{kind}")(msg)
        except (SessionError, GraphFormatError, ValueError, KeyError) as exc:
            detail = exc.args[0] if exc.args else str(exc)
            return [{"reply": "error", "re": msg_id, "message": str(detail)}]
        ack = {"reply": "ack", "re": msg_id, **ack_data}
        return replies + [ack]

    # -- individual messages ----------------------------------------------------

    def _handle_load_graph(self, msg: dict):
        if "text" in msg:
            text = msg["text"]
            fmt = msg.get("format", "edge_list")
        else:
            path = msg.get("path", self.default_graph_path)
            if not path:
                raise SessionError("load_graph needs 'text' or 'path'")
            fmt = msg.get("format", guess_format(path))
            try:
                text = Path(path).read_text()
            except OSError as exc:
                raise SessionError(f"cannot read graph file: {exc}") from None
        graph = parse_graph(text, fmt)
        wg = weigh_graph(graph, msg.get("weighting", "auto"), msg.get("hops"))
        barcode = compute_barcode(wg)
        if "seed" in msg:
            self.seed = int(msg["seed"])

        self.graph = graph
        self.wg = wg
        self.barcode = barcode
        self.bar_order = sort_bars(barcode)
        self.selection = Selection()
        self.state = layout_mod.init_layout(graph, self.seed)
        self.features = feature_gate(len(graph.nodes), len(graph.edges))
        self.playing = False
        self.frame_counter = 0
        self.source_positions = None
        reply = {
            "reply": "barcode",
            "barcode": barcode_to_json(barcode),
            "order": self.bar_order,
            "features": self.features.to_json(),
            "nodes": [{"id": n.id, "category": n.category} for n in graph.nodes],
            "edges": [[e.source, e.target] for e in graph.edges],
            "seed": self.seed,
        }
        return [reply], {}

    def _handle_set_config(self, msg: dict):
        changes = msg.get("config")
        if not isinstance(changes, dict):
            raise SessionError("set_config needs a 'config' object")
        unknown = set(changes) - set(ForceConfig.__dataclass_fields__)
        if unknown:
            raise SessionError(f"unknown config keys: {sorted(unknown)}")
        self.config = self.config.replace(**{k: float(v) for k, v in changes.items()})
        return [], {}

    def _mutate_selection(self, new_selection: Selection) -> None:
        # Selection edits land between steps by construction (handle() is
        # never called mid-tick); capture the unmodified layout as the
        # metrics source the first time the selection becomes active.
        if not self.selection.active and new_selection.active:
            self.source_positions = self.state.positions.copy()
        self.selection = new_selection

    def _handle_set_threshold(self, msg: dict):
        if "value" not in msg:
            raise SessionError("set_threshold needs 'value'")
        self._mutate_selection(
            Selection(float(msg["value"]), self.selection.repulsed_bars)
        )
        return [], {"selection": self._selection_json()}

    def _handle_toggle_repulsion(self, msg: dict):
        if "bar" not in msg:
            raise SessionError("toggle_repulsion needs 'bar'")
        bar_id = int(msg["bar"])
        self.barcode.bar(bar_id)  # raises KeyError for unknown ids
        self._mutate_selection(self.selection.toggled(bar_id))
        return [], {"selection": self._selection_json()}

    def _handle_hover_bar(self, msg: dict):
        if "bar" not in msg:
            raise SessionError("hover_bar needs 'bar'")
        bar = bar_metadata(self.barcode, int(msg["bar"]))
        membership = {node_id: 0 for node_id in bar.subset_u}
        membership.update({node_id: 1 for node_id in bar.subset_v})
        mode = "halo" if self.features.halo_mode else "hull"
        return [], {"bar": bar.id, "membership": membership, "mode": mode}

    def _handle_play(self, msg: dict):
        self.playing = True
        return [], {"playing": True}

    def _handle_pause(self, msg: dict):
        self.playing = False
        return [], {"playing": False}

    def _handle_step_n(self, msg: dict):
        n = int(msg.get("n", 1))
        if n < 0:
            raise SessionError("step_n needs n >= 0")
        return [self.tick() for _ in range(n)], {}

    def _handle_snapshot_request(self, msg: dict):
        return [self._frame_payload(advance=False), self._metrics_reply()], {}

    # -- frames and metrics -------------------------------------------------------

    def tick(self) -> dict:
        """Advance one simulation step and emit the frame it produced."""
        if self.state is None:
            raise SessionError("no graph loaded")
        self.state = layout_mod.step(
            self.state, self.graph, self.barcode, self.selection, self.config
        )
        return self._frame_payload(advance=True)

    def _frame_payload(self, advance: bool) -> dict:
        if advance:
            self.frame_counter += 1
        positions = {
            n.id: [float(self.state.positions[i, 0]), float(self.state.positions[i, 1])]
            for i, n in enumerate(self.graph.nodes)
        }
        return {
            "reply": "frame",
            "frame": self.frame_counter,
            "iteration": self.state.iteration,
            "positions": positions,
            "selection": self._selection_json(),
        }

    def _selection_json(self) -> dict:
        return {
            "threshold": self.selection.contraction_threshold,
            "repulsed": sorted(self.selection.repulsed_bars),
        }

    def _metrics_reply(self) -> dict:
        if self.source_positions is None or not self.selection.active:
            return {"reply": "metrics", "metrics": {"E_C": None, "E_R": None, "bars": []}}
        report = effect_metrics(
            self.source_positions, self.state.positions, self.selection, self.barcode
        )
        return {"reply": "metrics", "metrics": report.to_json()}


def guess_format(path: str) -> str:
    return "graph_json" if str(path).endswith(".json") else "edge_list"
