/**
 * Before/after comparison math, kept DOM-free for testing.
 *
 * Swipe mode draws the original in full and the forged image clipped to
 * the left of a divider; divider at 0 shows only the original, at 1 only
 * the forged image. Side-by-side locks one transform across both panes.
 */

import { Transform } from "./viewstate.js";

export interface SwipeLayout {
  /** Width in source pixels of the forged strip to draw from x=0. */
  forgedWidth: number;
  /** Divider position in destination pixels. */
  dividerX: number;
}

export function swipeLayout(divider: number, width: number): SwipeLayout {
  const t = Math.min(1, Math.max(0, divider));
  const w = Math.round(t * width);
  return { forgedWidth: w, dividerX: w };
}

export interface PaneTransforms {
  left: Transform;
  right: Transform;
}

/** Side-by-side panes share zoom and pan exactly. */
export function lockedPanes(transform: Transform): PaneTransforms {
  return { left: { ...transform }, right: { ...transform } };
}
