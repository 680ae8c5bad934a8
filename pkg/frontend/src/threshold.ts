/** Threshold filter-bar dragging: pixel position to persistence value, with
 * per-frame message coalescing so a drag emits at most one set_threshold per
 * animation tick. */

import type { SetThresholdMessage } from "./protocol.js";

export function dragToThreshold(
  pixelX: number,
  panelWidth: number,
  maxPersistence: number,
): number {
  if (panelWidth <= 0) return 0;
  const clamped = Math.min(Math.max(pixelX, 0), panelWidth);
  return (clamped / panelWidth) * maxPersistence;
}

export class ThresholdCoalescer {
  private pending: number | null = null;

  /** Record a drag sample; nothing is emitted until the next flush. */
  offer(value: number): void {
    this.pending = value;
  }

  /** Emit the latest sample as a message, once per frame. */
  flush(): SetThresholdMessage | null {
    if (this.pending === null) return null;
    const msg: SetThresholdMessage = { kind: "set_threshold", value: this.pending };
    this.pending = null;
    return msg;
  }
}
