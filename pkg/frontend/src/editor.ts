/** Pure annotation-editor state; all DOM and network handling lives outside.
 *
 * Invariants kept here: every box lies fully inside the current image, and
 * the dirty flag is set exactly when the box list differs from the last
 * loaded or saved server state.
 */

import { dragToRect, hitTest, inBounds, moveWithin } from "./geometry.js";
import type { Box, FramePayload, WireBox } from "./types.js";
import { fromWire, toWire } from "./types.js";

export class EditorState {
  readonly frameCount: number;

  index = 0;
  imageWidth = 0;
  imageHeight = 0;
  boxes: Box[] = [];
  version = 1;
  selectedClass: number;
  selection: number | null = null;
  dirty = false;

  private readonly classIds: readonly number[];

  constructor(frameCount: number, classIds: readonly number[]) {
    if (frameCount < 1) throw new Error("frameCount must be >= 1");
    if (classIds.length === 0) throw new Error("classIds must not be empty");
    this.frameCount = frameCount;
    this.classIds = classIds;
    this.selectedClass = classIds[0];
  }

  /** Install a frame fetched from the server; clears edits and selection. */
  loadFrame(payload: FramePayload): void {
    this.index = payload.index;
    this.imageWidth = payload.width;
    this.imageHeight = payload.height;
    this.boxes = payload.boxes.map(fromWire);
    this.version = payload.version;
    this.selection = null;
    this.dirty = false;
  }

  /** Boxes in wire form, ready for a PUT. */
  wireBoxes(): WireBox[] {
    return this.boxes.map(toWire);
  }

  /** Record a successful save: state on the server now matches ours. */
  markSaved(newVersion: number): void {
    this.version = newVersion;
    this.dirty = false;
  }

  /**
   * Add a box from a drag gesture using the selected class. Returns the
   * box, or null when the drag was degenerate (and nothing changed).
   */
  addDrag(x0: number, y0: number, x1: number, y1: number): Box | null {
    const rect = dragToRect(x0, y0, x1, y1, this.imageWidth, this.imageHeight);
    if (rect === null) return null;
    const box: Box = { classId: this.selectedClass, ...rect };
    this.boxes.push(box);
    this.selection = this.boxes.length - 1;
    this.dirty = true;
    return box;
  }

  /** Select the topmost box under the point, or clear the selection. */
  selectAt(px: number, py: number): number | null {
    const hit = hitTest(this.boxes, px, py);
    this.selection = hit >= 0 ? hit : null;
    return this.selection;
  }

  deleteSelected(): boolean {
    if (this.selection === null) return false;
    this.boxes.splice(this.selection, 1);
    this.selection = null;
    this.dirty = true;
    return true;
  }

  /** Move the selected box, clamped inside the image. */
  moveSelected(dx: number, dy: number): boolean {
    if (this.selection === null) return false;
    const box = this.boxes[this.selection];
    const moved = moveWithin(box, dx, dy, this.imageWidth, this.imageHeight);
    if (moved.x === box.x && moved.y === box.y) return false;
    this.boxes[this.selection] = { ...box, ...moved };
    this.dirty = true;
    return true;
  }

  /** Re-tag the selected box with the currently selected class. */
  relabelSelected(): boolean {
    if (this.selection === null) return false;
    const box = this.boxes[this.selection];
    if (box.classId === this.selectedClass) return false;
    this.boxes[this.selection] = { ...box, classId: this.selectedClass };
    this.dirty = true;
    return true;
  }

  /**
   * Map a digit hotkey (1-9) to a class selection. The selection sticks
   * across frame loads. Returns false for digits with no class.
   */
  selectClassByDigit(digit: number): boolean {
    if (!this.classIds.includes(digit)) return false;
    this.selectedClass = digit;
    return true;
  }

  selectClass(classId: number): boolean {
    if (!this.classIds.includes(classId)) return false;
    this.selectedClass = classId;
    return true;
  }

  /** Target of a relative navigation, or null when out of range (no-op). */
  targetIndex(delta: number): number | null {
    const target = this.index + delta;
    return target >= 0 && target < this.frameCount ? target : null;
  }

  /** Every box inside the image; the editor maintains this by construction. */
  allBoxesInBounds(): boolean {
    return this.boxes.every((b) => inBounds(b, this.imageWidth, this.imageHeight));
  }
}
