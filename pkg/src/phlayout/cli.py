"""Command line entry point: serve / batch / barcode."""
from __future__ import annotations

import argparse
import contextlib
import json
import signal
import sys
from pathlib import Path

from .barcode import barcode_to_json, compute_barcode
from .batch import BatchError, run_batch
from .graph import GraphFormatError, parse_graph
from .session import guess_format
from .weighting import weigh_graph


def _add_weighting_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--weighting",
        choices=("jaccard", "given", "auto"),
        default="auto",
        help="edge weighting: 'given' uses weights from the file, 'jaccard' "
        "derives them from ego-neighborhood overlap (default: auto)",
    )
    parser.add_argument(
        "--hops",
        type=int,
        default=None,
        help="ego-neighborhood radius for jaccard weighting "
        "(default: 1 when mean degree >= 4, else 2)",
    )
    parser.add_argument(
        "--format",
        choices=("edge_list", "graph_json"),
        default=None,
        help="input format (default: guessed from the file extension)",
    )


def main(argv: list[str] | None = None) -> int:
    # behave like a well-mannered pipe citizen (`phlayout barcode ... | head`)
    with contextlib.suppress(AttributeError, ValueError):
        signal.signal(signal.SIGPIPE, signal.SIG_DFL)
    parser = argparse.ArgumentParser(
        prog="phlayout",
        description="Force-directed graph layouts steered by persistence barcodes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_barcode = sub.add_parser("barcode", help="print the barcode JSON for a graph")
    p_barcode.add_argument("--graph", required=True)
    _add_weighting_flags(p_barcode)

    p_serve = sub.add_parser("serve", help="run the interactive session server")
    p_serve.add_argument("--graph", default=None, help="default graph for sessions")
    p_serve.add_argument("--port", type=int, default=7641)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--seed", type=int, default=None)

    p_batch = sub.add_parser("batch", help="run a scripted layout pipeline")
    p_batch.add_argument("--config", required=True)
    p_batch.add_argument("--out", default="phlayout_out")
    p_batch.add_argument(
        "--bundle",
        choices=("on", "off", "auto"),
        default=None,
        help="override the config's bundling mode (auto = edge-count rule)",
    )
    p_batch.add_argument(
        "--style", default=None, help="JSON style file for the SVG render"
    )

    args = parser.parse_args(argv)

    if args.command == "barcode":
        try:
            text = Path(args.graph).read_text()
            fmt = args.format or guess_format(args.graph)
            wg = weigh_graph(parse_graph(text, fmt), args.weighting, args.hops)
            print(json.dumps(barcode_to_json(compute_barcode(wg)), indent=1))
        except (OSError, GraphFormatError, ValueError) as exc:
            print(f"phlayout: {exc}", file=sys.stderr)
            return 2
        return 0

    if args.command == "serve":
        from .server import serve_forever

        serve_forever(args.host, args.port, args.graph, args.seed)
        return 0

    if args.command == "batch":
        try:
            manifest = run_batch(
                args.config, args.out,
                bundle_override=args.bundle, style_override=args.style,
            )
        except (BatchError, GraphFormatError) as exc:
            print(f"phlayout: {exc}", file=sys.stderr)
            return 2
        print(json.dumps(manifest["timings"], indent=1))
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())
