"""Offline pipeline: graph -> weights -> barcode -> scripted selection ->
converged layout, written out as layout JSON, SVG, metrics, and timings."""
from __future__ import annotations

import json
import time
from pathlib import Path

from .analysis import cluster_rest_lengths, effect_metrics, greedy_modularity
from .barcode import barcode_to_json, compute_barcode, sort_bars
from .bundling import bundle_graph
from .graph import parse_graph
from .layout import ForceConfig, Selection, init_layout, run
from .render import StyleSpec, render_svg
from .session import default_seed, guess_format
from .weighting import weigh_graph


class BatchError(Exception):
    """Configuration or input problem; the CLI maps this to a nonzero exit."""


def _load_config(config_path: Path) -> dict:
    try:
        doc = json.loads(config_path.read_text())
    except OSError as exc:
        raise BatchError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise BatchError(f"config is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "graph" not in doc:
        raise BatchError("batch config must be an object with a 'graph' path")
    return doc


def run_batch(
    config_path: str | Path,
    out_dir: str | Path,
    bundle_override: str | None = None,
    style_override: str | None = None,
) -> dict:
    """Execute one scripted run; returns a manifest of what was written."""
    config_path = Path(config_path)
    cfg = _load_config(config_path)
    if bundle_override is not None:
        cfg["bundle"] = bundle_override
    if style_override is not None:
        cfg["style"] = str(Path(style_override).resolve())
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    graph_path = Path(cfg["graph"])
    if not graph_path.is_absolute():
        graph_path = config_path.parent / graph_path
    try:
        text = graph_path.read_text()
    except OSError as exc:
        raise BatchError(f"cannot read graph file: {exc}") from None
    graph = parse_graph(text, cfg.get("format", guess_format(str(graph_path))))

    wg = weigh_graph(graph, cfg.get("weighting", "auto"), cfg.get("hops"))
    t0 = time.perf_counter()
    barcode = compute_barcode(wg)
    barcode_ms = (time.perf_counter() - t0) * 1000.0
    order = sort_bars(barcode)

    ranks = cfg.get("repulse_ranks", [])
    repulsed = set()
    for rank in ranks:
        if not isinstance(rank, int) or rank < 0 or rank >= len(order):
            raise BatchError(
                f"repulse rank {rank} out of range (barcode has {len(order)} bars)"
            )
        repulsed.add(order[rank])
    selection = Selection(float(cfg.get("threshold", 0.0)), frozenset(repulsed))

    force_config = ForceConfig()
    try:
        if "config_file" in cfg:
            config_file = Path(cfg["config_file"])
            if not config_file.is_absolute():
                config_file = config_path.parent / config_file
            force_config = ForceConfig.from_file_text(config_file.read_text())
        if "force_config" in cfg:
            force_config = force_config.replace(
                **{k: float(v) for k, v in cfg["force_config"].items()}
            )
    except OSError as exc:
        raise BatchError(f"cannot read force config: {exc}") from None
    except (TypeError, ValueError) as exc:
        raise BatchError(f"bad force config: {exc}") from None

    rest_lengths = None
    if "cluster" in cfg:
        spec = cfg["cluster"]
        if not isinstance(spec, dict) or "k" not in spec:
            raise BatchError("'cluster' must be an object with a 'k'")
        hierarchy = greedy_modularity(wg)
        try:
            rest_lengths = cluster_rest_lengths(
                hierarchy,
                graph,
                int(spec["k"]),
                force_config.spring_rest_length,
                float(spec.get("multiplier", 4.0)),
            )
        except (TypeError, ValueError) as exc:
            raise BatchError(str(exc)) from None

    seed = int(cfg["seed"]) if "seed" in cfg else default_seed()
    iterations = int(cfg.get("iterations", 1000))
    initial = init_layout(graph, seed)

    source = run(
        initial, graph, barcode, Selection(), force_config, iterations, rest_lengths
    )
    t0 = time.perf_counter()
    target = run(
        initial, graph, barcode, selection, force_config, iterations, rest_lengths
    )
    step_total = time.perf_counter() - t0
    mean_step_ms = (step_total / iterations) * 1000.0 if iterations else 0.0

    bundling = bundle_graph(graph, target.positions, cfg.get("bundle", "auto"))

    style = StyleSpec()
    if "style" in cfg:
        style_path = Path(cfg["style"])
        if not style_path.is_absolute():
            style_path = config_path.parent / style_path
        try:
            style = StyleSpec.from_json(style_path.read_text())
        except OSError as exc:
            raise BatchError(f"cannot read style file: {exc}") from None
        except (TypeError, ValueError) as exc:
            raise BatchError(f"bad style file: {exc}") from None

    positions_json = {
        n.id: [float(target.positions[i, 0]), float(target.positions[i, 1])]
        for i, n in enumerate(graph.nodes)
    }
    layout_doc = {"iteration": target.iteration, "positions": positions_json}
    (out / "layout.json").write_text(json.dumps(layout_doc, indent=1))

    svg = render_svg(graph, target.positions, style, bundles=bundling.bundles)
    (out / "render.svg").write_text(svg)

    report = effect_metrics(source.positions, target.positions, selection, barcode)
    (out / "metrics.json").write_text(json.dumps(report.to_json(), indent=1))

    timings = {
        "barcode_ms": barcode_ms,
        "mean_step_ms": mean_step_ms,
        "iterations": iterations,
        "bundling": bundling.status,
    }
    (out / "timings.json").write_text(json.dumps(timings, indent=1))

    return {
        "out_dir": str(out),
        "artifacts": ["layout.json", "render.svg", "metrics.json", "timings.json"],
        "barcode": barcode_to_json(barcode),
        "selection": {
            "threshold": selection.contraction_threshold,
            "repulsed": sorted(selection.repulsed_bars),
        },
        "timings": timings,
    }
