/** Pure view-model for the barcode panel: the rendered list is a function of
 * the last server barcode, the last acknowledged selection, the viewport,
 * and the hovered bar — nothing else. */

import type { BarcodeReply, BarRecord, SelectionState } from "./protocol.js";
import { hyperbolicMap, ViewportState } from "./hyperbolic.js";

export type BarVisualState = "normal" | "washed-out" | "darkened" | "hovered";

export interface BarView {
  barId: number;
  /** height slot in display coordinates, bottom = sort index 0 */
  slot: number;
  /** bar length relative to the widest bar, in (0, 1] */
  length: number;
  /** position of the subset-ratio split line: min / (min + max) */
  splitFraction: number;
  leftColor: string;
  rightColor: string;
  state: BarVisualState;
}

// tab10, matching the server's SVG palette
export const CATEGORY_PALETTE = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

// neutral tones for cause nodes without a category
export const NEUTRAL_TONES: [string, string] = ["#b0b0b0", "#d9d9d9"];

export function categoryColors(barcode: BarcodeReply): Map<string, string> {
  const assignment = new Map<string, string>();
  for (const node of barcode.nodes) {
    if (node.category !== null && !assignment.has(node.category)) {
      assignment.set(
        node.category,
        CATEGORY_PALETTE[assignment.size % CATEGORY_PALETTE.length],
      );
    }
  }
  return assignment;
}

function sideColors(
  bar: BarRecord,
  barcode: BarcodeReply,
  palette: Map<string, string>,
): [string, string] {
  const categoryOf = new Map(barcode.nodes.map((n) => [n.id, n.category]));
  const colors = bar.cause.map((nodeId, side) => {
    const category = categoryOf.get(nodeId) ?? null;
    if (category === null) return NEUTRAL_TONES[side];
    return palette.get(category) ?? NEUTRAL_TONES[side];
  });
  return [colors[0], colors[1]];
}

export function barState(
  barId: number,
  persistence: number,
  selection: SelectionState,
  hoveredBar: number | null,
): BarVisualState {
  if (hoveredBar === barId) return "hovered";
  if (selection.repulsed.includes(barId)) return "darkened";
  if (persistence < selection.threshold) return "washed-out";
  return "normal";
}

export function renderBarcode(
  barcode: BarcodeReply,
  selection: SelectionState,
  viewport: ViewportState,
  hoveredBar: number | null = null,
): BarView[] {
  const byId = new Map(barcode.barcode.bars.map((b) => [b.id, b]));
  const maxPersistence = Math.max(
    ...barcode.barcode.bars.map((b) => b.persistence),
    0,
  );
  const palette = categoryColors(barcode);
  return barcode.order.map((barId, sortIndex) => {
    const bar = byId.get(barId);
    if (bar === undefined) throw new Error(`order references unknown bar ${barId}`);
    const [small, large] = bar.ratio;
    const [leftColor, rightColor] = sideColors(bar, barcode, palette);
    return {
      barId,
      slot: hyperbolicMap(sortIndex, viewport),
      length: maxPersistence > 0 ? bar.persistence / maxPersistence : 0,
      splitFraction: small + large > 0 ? small / (small + large) : 0.5,
      leftColor,
      rightColor,
      state: barState(barId, bar.persistence, selection, hoveredBar),
    };
  });
}
