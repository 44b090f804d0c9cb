/** Drag-to-box arithmetic. Boxes are integer pixels with half-open extents. */

export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

/** Minimum drawn box side; anything smaller is treated as a stray click. */
export const MIN_BOX_SIDE = 2;

const clamp = (v: number, lo: number, hi: number) => Math.min(Math.max(v, lo), hi);

/**
 * Turn a drag gesture into a box: corners may arrive in any order and may
 * run outside the image; the result is normalized to positive width and
 * height, snapped to integer pixels, and clamped so it lies fully inside
 * the width x height image. Degenerate results (a side under
 * MIN_BOX_SIDE) return null.
 */
export function dragToRect(
  x0: number,
  y0: number,
  x1: number,
  y1: number,
  imageWidth: number,
  imageHeight: number,
): Rect | null {
  const left = clamp(Math.round(Math.min(x0, x1)), 0, imageWidth);
  const right = clamp(Math.round(Math.max(x0, x1)), 0, imageWidth);
  const top = clamp(Math.round(Math.min(y0, y1)), 0, imageHeight);
  const bottom = clamp(Math.round(Math.max(y0, y1)), 0, imageHeight);
  const w = right - left;
  const h = bottom - top;
  if (w < MIN_BOX_SIDE || h < MIN_BOX_SIDE) return null;
  return { x: left, y: top, w, h };
}

/** Shift a rect by (dx, dy), keeping it fully inside the image. */
export function moveWithin(
  rect: Rect,
  dx: number,
  dy: number,
  imageWidth: number,
  imageHeight: number,
): Rect {
  return {
    x: clamp(rect.x + dx, 0, imageWidth - rect.w),
    y: clamp(rect.y + dy, 0, imageHeight - rect.h),
    w: rect.w,
    h: rect.h,
  };
}

export function contains(rect: Rect, px: number, py: number): boolean {
  return px >= rect.x && px < rect.x + rect.w && py >= rect.y && py < rect.y + rect.h;
}

/** Index of the topmost (last-drawn) box containing the point, or -1. */
export function hitTest(rects: readonly Rect[], px: number, py: number): number {
  for (let i = rects.length - 1; i >= 0; i--) {
    if (contains(rects[i], px, py)) return i;
  }
  return -1;
}

/** True when the rect lies fully inside the image bounds. */
export function inBounds(rect: Rect, imageWidth: number, imageHeight: number): boolean {
  return (
    rect.x >= 0 &&
    rect.y >= 0 &&
    rect.w >= 1 &&
    rect.h >= 1 &&
    rect.x + rect.w <= imageWidth &&
    rect.y + rect.h <= imageHeight
  );
}
