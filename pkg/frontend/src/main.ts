/** Browser entry point: wires the pure editor state to canvas and HTTP. */

import { ApiClient, ConflictError } from "./api.js";
import { categoryColors, classColor } from "./colors.js";
import { EditorState } from "./editor.js";
import type { TaxonomyEntry } from "./types.js";

const MOVE_STEP = 1;
const MOVE_STEP_FAST = 10;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

class App {
  private readonly api = new ApiClient();
  private readonly canvas = el<HTMLCanvasElement>("canvas");
  private readonly ctx = this.canvas.getContext("2d")!;
  private readonly status = el<HTMLElement>("status");
  private readonly classBar = el<HTMLElement>("classes");
  private readonly image = new Image();

  private editor!: EditorState;
  private taxonomy: TaxonomyEntry[] = [];
  private colors = new Map<string, string>();
  private imageOk = false;
  private message = "";
  private drag: { x0: number; y0: number; x1: number; y1: number } | null = null;

  async start(): Promise<void> {
    const manifest = await this.api.manifest();
    this.taxonomy = manifest.taxonomy;
    this.colors = categoryColors(this.taxonomy);
    this.editor = new EditorState(
      manifest.frames.length,
      this.taxonomy.map((t) => t.class_id),
    );
    this.buildClassBar();
    this.bindEvents();
    await this.loadFrame(0);
  }

  private buildClassBar(): void {
    for (const entry of this.taxonomy) {
      const btn = document.createElement("button");
      btn.textContent = `${entry.class_id} ${entry.name}`;
      btn.style.borderLeft = `6px solid ${this.colors.get(entry.report_category) ?? "#888"}`;
      btn.dataset.classId = String(entry.class_id);
      btn.addEventListener("click", () => {
        this.editor.selectClass(entry.class_id);
        this.refreshClassBar();
        this.render();
      });
      this.classBar.appendChild(btn);
    }
    this.refreshClassBar();
  }

  private refreshClassBar(): void {
    for (const btn of this.classBar.querySelectorAll("button")) {
      const active = Number(btn.dataset.classId) === this.editor.selectedClass;
      btn.classList.toggle("active", active);
    }
  }

  private bindEvents(): void {
    this.canvas.addEventListener("mousedown", (e) => this.onMouseDown(e));
    this.canvas.addEventListener("mousemove", (e) => this.onMouseMove(e));
    window.addEventListener("mouseup", (e) => this.onMouseUp(e));
    window.addEventListener("keydown", (e) => this.onKeyDown(e));
    el<HTMLButtonElement>("prev").addEventListener("click", () => void this.navigate(-1));
    el<HTMLButtonElement>("next").addEventListener("click", () => void this.navigate(1));
    el<HTMLButtonElement>("save").addEventListener("click", () => void this.save());
    window.addEventListener("beforeunload", (e) => {
      if (this.editor.dirty) e.preventDefault();
    });
  }

  private canvasPoint(e: MouseEvent): { x: number; y: number } {
    const rect = this.canvas.getBoundingClientRect();
    const sx = this.canvas.width / rect.width;
    const sy = this.canvas.height / rect.height;
    return { x: (e.clientX - rect.left) * sx, y: (e.clientY - rect.top) * sy };
  }

  private onMouseDown(e: MouseEvent): void {
    if (e.button !== 0) return;
    const p = this.canvasPoint(e);
    this.drag = { x0: p.x, y0: p.y, x1: p.x, y1: p.y };
  }

  private onMouseMove(e: MouseEvent): void {
    if (!this.drag) return;
    const p = this.canvasPoint(e);
    this.drag.x1 = p.x;
    this.drag.y1 = p.y;
    this.render();
  }

  private onMouseUp(e: MouseEvent): void {
    if (!this.drag) return;
    const { x0, y0, x1, y1 } = this.drag;
    this.drag = null;
    const moved = Math.abs(x1 - x0) >= 2 || Math.abs(y1 - y0) >= 2;
    if (moved) {
      this.editor.addDrag(x0, y0, x1, y1);
    } else {
      const p = this.canvasPoint(e);
      this.editor.selectAt(p.x, p.y);
    }
    this.render();
  }

  private onKeyDown(e: KeyboardEvent): void {
    if (e.target instanceof HTMLInputElement) return;
    if (e.key >= "1" && e.key <= "9") {
      if (this.editor.selectClassByDigit(Number(e.key))) {
        this.refreshClassBar();
        this.render();
      }
      return;
    }
    const step = e.shiftKey ? MOVE_STEP_FAST : MOVE_STEP;
    switch (e.key) {
      case "Delete":
      case "Backspace":
        if (this.editor.deleteSelected()) this.render();
        break;
      case "ArrowLeft":
        if (this.editor.selection !== null) this.editor.moveSelected(-step, 0);
        else void this.navigate(-1);
        this.render();
        break;
      case "ArrowRight":
        if (this.editor.selection !== null) this.editor.moveSelected(step, 0);
        else void this.navigate(1);
        this.render();
        break;
      case "ArrowUp":
        if (this.editor.moveSelected(0, -step)) this.render();
        e.preventDefault();
        break;
      case "ArrowDown":
        if (this.editor.moveSelected(0, step)) this.render();
        e.preventDefault();
        break;
      case "r":
        if (this.editor.relabelSelected()) this.render();
        break;
      case "s":
        void this.save();
        break;
      case "PageUp":
        void this.navigate(-1);
        break;
      case "PageDown":
        void this.navigate(1);
        break;
    }
  }

  private async navigate(delta: number): Promise<void> {
    const target = this.editor.targetIndex(delta);
    if (target === null) return;
    if (this.editor.dirty) {
      const leave = window.confirm("Unsaved changes on this frame. Discard them?");
      if (!leave) return;
    }
    await this.loadFrame(target);
  }

  private async loadFrame(index: number): Promise<void> {
    try {
      const payload = await this.api.frame(index);
      this.editor.loadFrame(payload);
    } catch (err) {
      this.setStatus(`load failed: ${String(err)}`);
      return;
    }
    this.imageOk = false;
    this.image.onload = () => {
      this.imageOk = true;
      this.render();
    };
    this.image.onerror = () => {
      this.imageOk = false;
      this.render();
    };
    this.image.src = this.api.imageUrl(index);
    this.canvas.width = this.editor.imageWidth;
    this.canvas.height = this.editor.imageHeight;
    this.message = "";
    this.render();
  }

  private async save(): Promise<void> {
    if (!this.editor.dirty) {
      this.setStatus("nothing to save");
      return;
    }
    const index = this.editor.index;
    try {
      const version = await this.api.saveBoxes(
        index,
        this.editor.wireBoxes(),
        this.editor.version,
      );
      this.editor.markSaved(version);
      this.setStatus(`saved frame ${index} (version ${version})`);
    } catch (err) {
      if (err instanceof ConflictError) {
        const reload = window.confirm(
          `Frame was changed elsewhere (server version ${err.currentVersion}). ` +
            "Reload it? Your unsaved boxes will be discarded only if you confirm.",
        );
        if (reload) await this.loadFrame(index);
        else this.setStatus("save conflict: resolve by reloading or re-saving after reload");
      } else {
        this.setStatus(`save failed (${String(err)}); edits kept, retry with Save`);
      }
    }
    this.render();
  }

  private setStatus(message: string): void {
    this.message = message;
    const e = this.editor;
    const dirtyMark = e.dirty ? " *unsaved*" : "";
    this.status.textContent =
      `frame ${e.index + 1}/${e.frameCount} v${e.version}${dirtyMark}` +
      (this.message ? ` | ${this.message}` : "");
  }

  private render(): void {
    const { ctx, canvas } = this;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    if (this.imageOk) {
      ctx.drawImage(this.image, 0, 0);
    } else {
      ctx.fillStyle = "#222";
      ctx.fillRect(0, 0, canvas.width, canvas.height);
      ctx.fillStyle = "#999";
      ctx.font = "16px sans-serif";
      ctx.fillText("image unavailable", 12, 24);
    }
    this.editor.boxes.forEach((box, i) => {
      const color = classColor(box.classId, this.taxonomy, this.colors);
      ctx.lineWidth = i === this.editor.selection ? 3 : 1.5;
      ctx.strokeStyle = color;
      ctx.strokeRect(box.x + 0.5, box.y + 0.5, box.w, box.h);
      ctx.fillStyle = color;
      ctx.font = "12px sans-serif";
      ctx.fillText(String(box.classId), box.x + 2, box.y + 12);
    });
    if (this.drag) {
      const { x0, y0, x1, y1 } = this.drag;
      ctx.setLineDash([4, 3]);
      ctx.strokeStyle = "#fff";
      ctx.lineWidth = 1;
      ctx.strokeRect(Math.min(x0, x1), Math.min(y0, y1), Math.abs(x1 - x0), Math.abs(y1 - y0));
      ctx.setLineDash([]);
    }
    this.setStatus(this.message);
  }
}

new App().start().catch((err) => {
  const status = document.getElementById("status");
  if (status) status.textContent = `failed to start: ${String(err)}`;
});
