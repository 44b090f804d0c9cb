"""Pluggable per-tile detectors and the grid-cell training-target assignment.

Three reference detectors ship with the toolkit:

* replay: emits the ground truth intersecting each tile, clipped and
  translated to tile coordinates, score 1.0. The oracle for end-to-end
  pipeline testing.
* jitter: replay degraded by seeded random drops, integer position
  shifts, and sampled scores. Deterministic given the seed, independent
  of tile scheduling order.
* external: a subprocess speaking line-delimited JSON over stdin/stdout,
  one response line per request line.
"""

from __future__ import annotations

import json
import queue
import random
import subprocess
import threading
from dataclasses import dataclass, field

from litterscan.dataset import FrameRecord
from litterscan.geometry import BoundingBox, intersect_box
from litterscan.tiling import Tile, TilePlan

DEFAULT_GRID_COLS = 20
DEFAULT_GRID_ROWS = 15
DEFAULT_CELL_SIZE = 32
DEFAULT_RECEPTIVE_FIELD = 139


@dataclass(frozen=True)
class Detection:
    """A box plus class id and confidence, in tile or frame coordinates."""

    box: BoundingBox
    class_id: int
    score: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")

    def with_box(self, box: BoundingBox) -> Detection:
        return Detection(box=box, class_id=self.class_id, score=self.score)


@dataclass(frozen=True)
class GridSpec:
    """Cell layout of the detector's output grid over one window.

    The receptive field is informational context; assignment uses each
    cell's own cell_size x cell_size region of the window.
    """

    cols: int = DEFAULT_GRID_COLS
    rows: int = DEFAULT_GRID_ROWS
    cell_size: int = DEFAULT_CELL_SIZE
    receptive_field: int = DEFAULT_RECEPTIVE_FIELD

    @property
    def width(self) -> int:
        return self.cols * self.cell_size

    @property
    def height(self) -> int:
        return self.rows * self.cell_size

    def cell_box(self, row: int, col: int) -> BoundingBox:
        return BoundingBox(col * self.cell_size, row * self.cell_size, self.cell_size, self.cell_size)


def assign_cells(boxes: list[BoundingBox], grid: GridSpec) -> list[list[int]]:
    """Per-cell indices of boxes intersecting that cell's region.

    Cells are row-major; the result has rows*cols entries and cell (r, c)
    is at index r*cols + c.
    """
    cells: list[list[int]] = [[] for _ in range(grid.rows * grid.cols)]
    for idx, box in enumerate(boxes):
        if box.x < 0 or box.y < 0 or box.x2 > grid.width or box.y2 > grid.height:
            raise ValueError(f"box {box} outside window {grid.width}x{grid.height}")
        c0 = box.x // grid.cell_size
        c1 = (box.x2 - 1) // grid.cell_size
        r0 = box.y // grid.cell_size
        r1 = (box.y2 - 1) // grid.cell_size
        for r in range(r0, r1 + 1):
            for c in range(c0, c1 + 1):
                cells[r * grid.cols + c].append(idx)
    return cells


@dataclass(frozen=True)
class JitterParams:
    drop_rate: float = 0.0
    shift_sigma: float = 0.0
    score_low: float = 0.5
    score_high: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.drop_rate <= 1.0:
            raise ValueError(f"drop_rate {self.drop_rate} outside [0, 1]")
        if self.shift_sigma < 0:
            raise ValueError("shift_sigma must be >= 0")
        if not 0.0 <= self.score_low <= self.score_high <= 1.0:
            raise ValueError("score range must satisfy 0 <= low <= high <= 1")


@dataclass(frozen=True)
class DetectorConfig:
    kind: str = "replay"
    jitter: JitterParams = field(default_factory=JitterParams)
    external_command: tuple[str, ...] = ()
    external_timeout: float = 30.0
    external_workers: int = 1

    def __post_init__(self) -> None:
        if self.kind not in ("replay", "jitter", "external"):
            raise ValueError(f"unknown detector kind {self.kind!r}")
        if self.external_timeout <= 0:
            raise ValueError("external_timeout must be positive")
        if self.kind == "external" and not self.external_command:
            raise ValueError("external detector requires a command")


class DetectorError(RuntimeError):
    """Raised when a detector fails on a tile; message names the tile."""


def replay_detect(frame: FrameRecord, plan: TilePlan, tile_id: int) -> list[Detection]:
    """Ground-truth boxes intersecting the tile, clipped, in tile coordinates."""
    tile = plan.tiles[tile_id]
    extent = plan.tile_box(tile_id)
    out = []
    for entry in frame.boxes:
        clipped = intersect_box(entry.box, extent)
        if clipped is None:
            continue
        out.append(
            Detection(
                box=clipped.translate(-tile.origin_x, -tile.origin_y),
                class_id=entry.class_id,
                score=1.0,
            )
        )
    return out


def jitter_detect(
    frame: FrameRecord, plan: TilePlan, tile_id: int, params: JitterParams
) -> list[Detection]:
    """Replay output degraded by seeded drops, shifts, and sampled scores.

    The RNG stream is keyed on (seed, frame image, tile_id), so results are
    identical across runs and across any parallel tile schedule.
    """
    rng = random.Random(f"{params.seed}|{frame.image_path}|{tile_id}")
    win_w = plan.window.width
    win_h = plan.window.height
    out = []
    for det in replay_detect(frame, plan, tile_id):
        if rng.random() < params.drop_rate:
            continue
        box = det.box
        if params.shift_sigma > 0:
            dx = round(rng.gauss(0.0, params.shift_sigma))
            dy = round(rng.gauss(0.0, params.shift_sigma))
            # Shifted boxes stay within the window extent.
            x = min(max(box.x + dx, 0), win_w - box.w)
            y = min(max(box.y + dy, 0), win_h - box.h)
            box = BoundingBox(x, y, box.w, box.h)
        score = rng.uniform(params.score_low, params.score_high)
        out.append(Detection(box=box, class_id=det.class_id, score=score))
    return out


@dataclass
class TileContext:
    """Everything a detector may need for one tile."""

    frame: FrameRecord
    plan: TilePlan
    tile: Tile
    image_path: str | None = None


class ReplayDetector:
    """Oracle detector: replays ground truth per tile with score 1.0."""

    needs_images = False

    def detect_tile(self, ctx: TileContext) -> list[Detection]:
        return replay_detect(ctx.frame, ctx.plan, ctx.tile.tile_id)

    def close(self) -> None:
        pass


class JitterDetector:
    """Controlled-degradation detector for PR-curve testing."""

    needs_images = False

    def __init__(self, params: JitterParams):
        self.params = params

    def detect_tile(self, ctx: TileContext) -> list[Detection]:
        return jitter_detect(ctx.frame, ctx.plan, ctx.tile.tile_id, self.params)

    def close(self) -> None:
        pass


class _ExternalWorker:
    """One subprocess plus a reader thread so responses can be awaited with a timeout."""

    def __init__(self, command: tuple[str, ...]):
        try:
            self.proc = subprocess.Popen(
                list(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as e:
            raise DetectorError(f"failed to start detector {command[0]!r}: {e}") from e
        # Set once a failure has been raised, so close() does not raise again
        # and mask the original error during cleanup.
        self.failed = False
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    def _read_loop(self) -> None:
        assert self.proc.stdout is not None
        for line in self.proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def request(self, payload: dict, timeout: float) -> str:
        assert self.proc.stdin is not None
        try:
            self.proc.stdin.write(json.dumps(payload) + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as e:
            self.failed = True
            raise DetectorError(f"tile {payload['tile_id']}: detector process is gone: {e}") from e
        try:
            line = self._lines.get(timeout=timeout)
        except queue.Empty:
            self.failed = True
            self.proc.kill()
            raise DetectorError(
                f"tile {payload['tile_id']}: detector timed out after {timeout}s"
            ) from None
        if line is None:
            self.failed = True
            code = self.proc.wait()
            raise DetectorError(f"tile {payload['tile_id']}: detector exited with code {code}")
        return line

    def close(self) -> None:
        if self.proc.poll() is None:
            if self.proc.stdin is not None:
                try:
                    self.proc.stdin.close()
                except OSError:
                    pass
            try:
                self.proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()
        if not self.failed and self.proc.returncode not in (0, None):
            raise DetectorError(f"detector exited with code {self.proc.returncode}")


class ExternalDetector:
    """Runs detection in subprocesses speaking line-delimited JSON.

    Requests: {"tile_id": int, "image_path": str, "width": int, "height": int}
    Responses: {"tile_id": int, "detections": [{x, y, w, h, class_id, score}]}
    One response line per request line. Access to each subprocess is
    serialized; a pool of them serves concurrent tiles.
    """

    needs_images = True

    def __init__(self, command: tuple[str, ...], timeout: float = 30.0, workers: int = 1):
        if workers < 1:
            raise ValueError("workers must be >= 1")
        self.command = command
        self.timeout = timeout
        self._pool: queue.Queue[_ExternalWorker] = queue.Queue()
        self._workers = [_ExternalWorker(command) for _ in range(workers)]
        for w in self._workers:
            self._pool.put(w)

    def detect_tile(self, ctx: TileContext) -> list[Detection]:
        if ctx.image_path is None:
            raise DetectorError(f"tile {ctx.tile.tile_id}: no tile image available")
        payload = {
            "tile_id": ctx.tile.tile_id,
            "image_path": ctx.image_path,
            "width": ctx.plan.window.width,
            "height": ctx.plan.window.height,
        }
        worker = self._pool.get()
        try:
            line = worker.request(payload, self.timeout)
        finally:
            self._pool.put(worker)
        return self._parse_response(line, ctx)

    def _parse_response(self, line: str, ctx: TileContext) -> list[Detection]:
        tid = ctx.tile.tile_id
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as e:
            raise DetectorError(f"tile {tid}: malformed detector response: {e}") from None
        if raw.get("tile_id") != tid:
            raise DetectorError(
                f"tile {tid}: response for wrong tile {raw.get('tile_id')!r}"
            )
        win_w = ctx.plan.window.width
        win_h = ctx.plan.window.height
        out = []
        for i, d in enumerate(raw.get("detections", [])):
            try:
                det = Detection(
                    box=BoundingBox(d["x"], d["y"], d["w"], d["h"]),
                    class_id=d["class_id"],
                    score=d["score"],
                )
            except (KeyError, TypeError, ValueError) as e:
                raise DetectorError(f"tile {tid}: bad detection {i}: {e}") from None
            b = det.box
            if b.x < 0 or b.y < 0 or b.x2 > win_w or b.y2 > win_h:
                raise DetectorError(f"tile {tid}: detection {i} outside window extent")
            out.append(det)
        return out

    def close(self) -> None:
        for w in self._workers:
            w.close()


def create_detector(config: DetectorConfig):
    if config.kind == "replay":
        return ReplayDetector()
    if config.kind == "jitter":
        return JitterDetector(config.jitter)
    return ExternalDetector(
        config.external_command,
        timeout=config.external_timeout,
        workers=config.external_workers,
    )
