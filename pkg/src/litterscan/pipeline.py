"""End-to-end orchestration: tile, detect, fuse, evaluate, time.

Frames are processed in order; tiles within a frame run on a worker pool.
Results are collected per tile id and detections are sorted before
writing, so output is bit-identical across runs and worker counts for the
replay and seeded-jitter detectors.
"""

from __future__ import annotations

import json
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from litterscan.dataset import BoxEntry, FrameRecord, SequenceManifest
from litterscan.detect import (
    Detection,
    DetectorConfig,
    DetectorError,
    TileContext,
    create_detector,
)
from litterscan.evaluation import (
    DEFAULT_IOU_THRESHOLD,
    DEFAULT_SCORE_THRESHOLDS,
    EvalReport,
    evaluate,
)
from litterscan.merge import MergeConfig, merge_detections
from litterscan.taxonomy import Taxonomy
from litterscan.tiling import FrameSpec, TilePlan, WindowSpec, plan_tiles, tile_to_frame


@dataclass(frozen=True)
class PipelineConfig:
    window: WindowSpec = field(default_factory=WindowSpec)
    merge: MergeConfig = field(default_factory=MergeConfig)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    iou_threshold: float = DEFAULT_IOU_THRESHOLD
    thresholds: tuple[float, ...] = DEFAULT_SCORE_THRESHOLDS
    methods: dict[str, str] = field(default_factory=dict)
    workers: int = 1

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @staticmethod
    def from_dict(raw: dict) -> PipelineConfig:
        window = WindowSpec(**raw.get("window", {}))
        merge = MergeConfig(**raw.get("merge", {}))
        det_raw = dict(raw.get("detector", {}))
        if "jitter" in det_raw:
            from litterscan.detect import JitterParams

            det_raw["jitter"] = JitterParams(**det_raw["jitter"])
        if "external_command" in det_raw:
            det_raw["external_command"] = tuple(det_raw["external_command"])
        detector = DetectorConfig(**det_raw)
        ev = raw.get("eval", {})
        return PipelineConfig(
            window=window,
            merge=merge,
            detector=detector,
            iou_threshold=ev.get("iou_threshold", DEFAULT_IOU_THRESHOLD),
            thresholds=tuple(ev.get("thresholds", DEFAULT_SCORE_THRESHOLDS)),
            methods=dict(ev.get("methods", {})),
            workers=raw.get("workers", 1),
        )

    @staticmethod
    def load(path: str | Path) -> PipelineConfig:
        return PipelineConfig.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass
class PipelineResult:
    detections: SequenceManifest
    report: EvalReport | None
    frame_count: int
    elapsed_s: float
    detector_s: float

    @property
    def fps(self) -> float:
        return self.frame_count / self.elapsed_s if self.elapsed_s > 0 else float("inf")

    @property
    def non_detector_fps(self) -> float:
        other = self.elapsed_s - self.detector_s
        return self.frame_count / other if other > 0 else float("inf")


def _crop_tiles(frame: FrameRecord, plan: TilePlan, images_root: Path, out_dir: Path) -> list[str]:
    """Write one window-sized crop per tile; returns crop paths by tile id."""
    from PIL import Image

    src = images_root / frame.image_path
    if not src.exists():
        raise DetectorError(f"frame image not found: {src}")
    with Image.open(src) as img:
        if img.size != (frame.width, frame.height):
            raise DetectorError(
                f"{src}: image is {img.size[0]}x{img.size[1]}, "
                f"manifest says {frame.width}x{frame.height}"
            )
        paths = []
        for tile in plan.tiles:
            box = plan.tile_box(tile.tile_id)
            crop = img.crop((box.x, box.y, box.x2, box.y2))
            path = out_dir / f"tile_{tile.tile_id:04d}.png"
            crop.save(path)
            paths.append(str(path))
    return paths


def _sort_key(taxonomy: Taxonomy):
    def key(entry: BoxEntry):
        cat = taxonomy.rollup(entry.class_id) if entry.class_id in taxonomy else ""
        return (cat, entry.class_id, entry.box)

    return key


def run_pipeline(
    manifest: SequenceManifest,
    taxonomy: Taxonomy,
    config: PipelineConfig = PipelineConfig(),
    images_root: str | Path | None = None,
) -> PipelineResult:
    """Tile every frame, detect per tile, fuse to frame detections, evaluate.

    The evaluation report is produced when any manifest frame carries
    ground-truth boxes. Detector failures abort with the frame named.
    """
    detector = create_detector(config.detector)
    images_root = Path(images_root) if images_root is not None else Path(".")
    det_frames: list[FrameRecord] = []
    detector_s = 0.0
    plans: dict[tuple[int, int], TilePlan] = {}
    start = time.perf_counter()
    try:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            for frame_idx, frame in enumerate(manifest.frames):
                key = (frame.width, frame.height)
                if key not in plans:
                    plans[key] = plan_tiles(FrameSpec(frame.width, frame.height), config.window)
                plan = plans[key]

                crop_dir = None
                crops: list[str | None] = [None] * len(plan.tiles)

                def detect_one(tile_id: int) -> tuple[list[Detection], float]:
                    t0 = time.perf_counter()
                    ctx = TileContext(
                        frame=frame, plan=plan, tile=plan.tiles[tile_id], image_path=crops[tile_id]
                    )
                    dets = detector.detect_tile(ctx)
                    return dets, time.perf_counter() - t0

                try:
                    if detector.needs_images:
                        crop_dir = tempfile.TemporaryDirectory(prefix="litterscan_tiles_")
                        crops[:] = _crop_tiles(frame, plan, images_root, Path(crop_dir.name))
                    results = list(pool.map(detect_one, range(len(plan.tiles))))
                except DetectorError as e:
                    raise DetectorError(
                        f"frame {frame_idx} ({frame.image_path}): {e}"
                    ) from e
                finally:
                    if crop_dir is not None:
                        crop_dir.cleanup()

                frame_dets: list[Detection] = []
                for tile_id, (dets, spent) in enumerate(results):
                    detector_s += spent
                    for det in dets:
                        frame_dets.append(tile_to_frame(det, plan.tiles[tile_id], config.window))
                fused = merge_detections(frame_dets, config.merge)
                entries = [
                    BoxEntry(class_id=d.class_id, box=d.box, score=d.score) for d in fused
                ]
                entries.sort(key=_sort_key(taxonomy))
                det_frames.append(
                    FrameRecord(
                        image_path=frame.image_path,
                        width=frame.width,
                        height=frame.height,
                        capture_time=frame.capture_time,
                        pose=frame.pose,
                        boxes=entries,
                    )
                )
    finally:
        detector.close()
    elapsed = time.perf_counter() - start

    report = None
    if any(frame.boxes for frame in manifest.frames):
        report = evaluate(
            det_frames,
            manifest.frames,
            taxonomy,
            iou_threshold=config.iou_threshold,
            thresholds=config.thresholds,
            methods=config.methods,
        )
    detections = SequenceManifest(frames=det_frames, capture_rate=manifest.capture_rate)
    return PipelineResult(
        detections=detections,
        report=report,
        frame_count=len(manifest.frames),
        elapsed_s=elapsed,
        detector_s=detector_s,
    )
