/** Draw-model for the live graph canvas.
 *
 * Frames are latest-wins: the canvas renders at most one frame per animation
 * tick and stale frames are dropped, never queued. Hover previews draw the
 * two subset sides as convex-hull outlines (small graphs) or per-node halos
 * (large graphs), per the server's feature gate.
 */

import type { BarcodeReply, FrameReply } from "./protocol.js";
import { categoryColors, NEUTRAL_TONES } from "./barcodeModel.js";

export interface Preview {
  membership: Record<string, 0 | 1>;
  mode: "halo" | "hull";
}

export const PREVIEW_COLORS: [string, string] = ["#6baed6", "#9e9ac8"];

export type DrawCommand =
  | { op: "halo"; x: number; y: number; radius: number; color: string }
  | { op: "hull"; points: [number, number][]; color: string }
  | { op: "edge"; from: [number, number]; to: [number, number] }
  | { op: "node"; x: number; y: number; color: string };

/** Keeps only the newest frame; take() clears it. */
export class FrameGate {
  private latest: FrameReply | null = null;
  dropped = 0;

  offer(frame: FrameReply): void {
    if (this.latest !== null && frame.frame > this.latest.frame) {
      this.dropped += 1;
    }
    if (this.latest === null || frame.frame > this.latest.frame) {
      this.latest = frame;
    }
  }

  take(): FrameReply | null {
    const frame = this.latest;
    this.latest = null;
    return frame;
  }
}

export function convexHull(points: [number, number][]): [number, number][] {
  // monotone chain; returns points in counter-clockwise order
  const sorted = [...points].sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  if (sorted.length <= 2) return sorted;
  const cross = (o: number[], a: number[], b: number[]) =>
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  const lower: [number, number][] = [];
  for (const p of sorted) {
    while (lower.length >= 2 && cross(lower[lower.length - 2], lower[lower.length - 1], p) <= 0) {
      lower.pop();
    }
    lower.push(p);
  }
  const upper: [number, number][] = [];
  for (const p of [...sorted].reverse()) {
    while (upper.length >= 2 && cross(upper[upper.length - 2], upper[upper.length - 1], p) <= 0) {
      upper.pop();
    }
    upper.push(p);
  }
  return [...lower.slice(0, -1), ...upper.slice(0, -1)];
}

export function drawCommands(
  barcode: BarcodeReply,
  frame: FrameReply,
  preview: Preview | null = null,
  nodeRadius = 4,
): DrawCommand[] {
  const commands: DrawCommand[] = [];
  const position = (id: string): [number, number] => {
    const p = frame.positions[id];
    if (p === undefined) throw new Error(`frame is missing node ${id}`);
    return p;
  };

  if (preview !== null) {
    const sides: [string[], string[]] = [[], []];
    for (const [nodeId, side] of Object.entries(preview.membership)) {
      sides[side].push(nodeId);
    }
    if (preview.mode === "hull") {
      sides.forEach((nodeIds, side) => {
        if (nodeIds.length === 0) return;
        commands.push({
          op: "hull",
          points: convexHull(nodeIds.map(position)),
          color: PREVIEW_COLORS[side],
        });
      });
    } else {
      sides.forEach((nodeIds, side) => {
        for (const nodeId of nodeIds) {
          const [x, y] = position(nodeId);
          commands.push({
            op: "halo", x, y, radius: 2.5 * nodeRadius, color: PREVIEW_COLORS[side],
          });
        }
      });
    }
  }

  for (const [source, target] of barcode.edges) {
    commands.push({ op: "edge", from: position(source), to: position(target) });
  }

  const palette = categoryColors(barcode);
  for (const node of barcode.nodes) {
    const [x, y] = position(node.id);
    const color =
      node.category !== null
        ? palette.get(node.category) ?? NEUTRAL_TONES[0]
        : NEUTRAL_TONES[0];
    commands.push({ op: "node", x, y, color });
  }
  return commands;
}
