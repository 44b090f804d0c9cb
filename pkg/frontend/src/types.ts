/** Shapes exchanged with the annotation backend, as served under /api. */

export interface TaxonomyEntry {
  class_id: number;
  name: string;
  report_category: string;
}

export interface ManifestFrame {
  index: number;
  image_path: string;
  width: number;
  height: number;
  box_count: number;
}

export interface ManifestPayload {
  capture_rate: number;
  frames: ManifestFrame[];
  taxonomy: TaxonomyEntry[];
}

/** A box on the wire: integer pixels, half-open extents. */
export interface WireBox {
  class_id: number;
  x: number;
  y: number;
  w: number;
  h: number;
  score?: number;
}

export interface FramePayload {
  index: number;
  image_path: string;
  width: number;
  height: number;
  boxes: WireBox[];
  version: number;
}

/** A box being edited; same coordinates as the wire form. */
export interface Box {
  classId: number;
  x: number;
  y: number;
  w: number;
  h: number;
  score?: number;
}

export function fromWire(b: WireBox): Box {
  const box: Box = { classId: b.class_id, x: b.x, y: b.y, w: b.w, h: b.h };
  if (b.score !== undefined) box.score = b.score;
  return box;
}

export function toWire(b: Box): WireBox {
  const wire: WireBox = { class_id: b.classId, x: b.x, y: b.y, w: b.w, h: b.h };
  if (b.score !== undefined) wire.score = b.score;
  return wire;
}
