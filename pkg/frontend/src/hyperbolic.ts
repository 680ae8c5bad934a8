/** Hyperbolic (fisheye) zoom for large barcodes. */

export interface ViewportState {
  scroll: number; // first visible slot, in display coordinates
  focusIndex: number;
  distortion: number; // 0 disables the zoom
  barCount: number;
}

export const DEFAULT_DISTORTION = 4;

export function makeViewport(barCount: number, focusIndex = 0): ViewportState {
  return { scroll: 0, focusIndex, distortion: DEFAULT_DISTORTION, barCount };
}

/**
 * Display slot of bar index i: with normalized offset t from the focus,
 * t' = (d + 1) * t / (d * |t| + 1). Strictly monotone in i, so the map is a
 * bijection on slots; d = 0 is the identity.
 */
export function hyperbolicMap(i: number, viewport: ViewportState): number {
  const { focusIndex, distortion, barCount } = viewport;
  if (barCount <= 1) return i;
  const scale = barCount;
  const t = (i - focusIndex) / scale;
  const warped = ((distortion + 1) * t) / (distortion * Math.abs(t) + 1);
  return focusIndex + warped * scale;
}

/** Inverse of hyperbolicMap, for hit testing a display slot back to a bar. */
export function hyperbolicUnmap(slot: number, viewport: ViewportState): number {
  const { focusIndex, distortion, barCount } = viewport;
  if (barCount <= 1) return slot;
  const scale = barCount;
  const warped = (slot - focusIndex) / scale;
  const t = warped / (distortion + 1 - distortion * Math.abs(warped));
  return focusIndex + t * scale;
}
