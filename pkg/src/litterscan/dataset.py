"""Annotation/detection file IO, capture decimation, and dataset statistics.

Files are UTF-8 JSON Lines: a header record first, then one frame record
per line. Detections use the same shape as annotations with an added
per-box score, so evaluation can consume either file uniformly.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from litterscan.geometry import BoundingBox
from litterscan.geomap import GeoPose
from litterscan.taxonomy import Taxonomy

log = logging.getLogger(__name__)

FORMAT_NAME = "litter-annotations"
FORMAT_VERSION = 1


class ManifestError(ValueError):
    """Raised for malformed or invariant-violating annotation files."""


@dataclass(frozen=True)
class BoxEntry:
    """One annotated or detected box: class id, geometry, optional score."""

    class_id: int
    box: BoundingBox
    score: float | None = None


@dataclass
class FrameRecord:
    image_path: str
    width: int
    height: int
    capture_time: float | None = None
    pose: GeoPose | None = None
    boxes: list[BoxEntry] = field(default_factory=list)


@dataclass
class SequenceManifest:
    frames: list[FrameRecord] = field(default_factory=list)
    capture_rate: float = 2.0


def _box_to_dict(entry: BoxEntry) -> dict:
    d = {
        "class_id": entry.class_id,
        "x": entry.box.x,
        "y": entry.box.y,
        "w": entry.box.w,
        "h": entry.box.h,
    }
    if entry.score is not None:
        d["score"] = entry.score
    return d


def _frame_to_dict(frame: FrameRecord) -> dict:
    d: dict = {
        "image_path": frame.image_path,
        "width": frame.width,
        "height": frame.height,
    }
    if frame.capture_time is not None:
        d["capture_time"] = frame.capture_time
    if frame.pose is not None:
        d["pose"] = {
            "lat": frame.pose.lat,
            "lon": frame.pose.lon,
            "heading_deg": frame.pose.heading_deg,
        }
    d["boxes"] = [_box_to_dict(b) for b in frame.boxes]
    return d


def save_annotations(manifest: SequenceManifest, path: str | Path) -> None:
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "capture_rate": manifest.capture_rate,
    }
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(header) + "\n")
        for frame in manifest.frames:
            f.write(json.dumps(_frame_to_dict(frame)) + "\n")


def _parse_frame(
    raw: dict,
    line_no: int,
    frame_index: int,
    taxonomy: Taxonomy | None,
    strict: bool,
) -> FrameRecord:
    try:
        image_path = raw["image_path"]
        width = raw["width"]
        height = raw["height"]
    except KeyError as e:
        raise ManifestError(f"line {line_no}: frame record missing field {e}") from None
    pose = None
    if raw.get("pose") is not None:
        p = raw["pose"]
        try:
            pose = GeoPose(lat=p["lat"], lon=p["lon"], heading_deg=p.get("heading_deg", 0.0))
        except (KeyError, TypeError, ValueError) as e:
            raise ManifestError(f"line {line_no}: bad pose: {e}") from None
    boxes = []
    for i, b in enumerate(raw.get("boxes", [])):
        try:
            box = BoundingBox(x=b["x"], y=b["y"], w=b["w"], h=b["h"])
            entry = BoxEntry(class_id=b["class_id"], box=box, score=b.get("score"))
        except (KeyError, TypeError, ValueError) as e:
            raise ManifestError(
                f"line {line_no}: frame {frame_index} box {i} is malformed: {e}"
            ) from None
        if box.x < 0 or box.y < 0 or box.x2 > width or box.y2 > height:
            raise ManifestError(
                f"line {line_no}: frame {frame_index} box {i} ({box.x},{box.y},"
                f"{box.w},{box.h}) outside frame {width}x{height}"
            )
        if entry.score is not None and not 0.0 <= entry.score <= 1.0:
            raise ManifestError(
                f"line {line_no}: frame {frame_index} box {i} score {entry.score} outside [0, 1]"
            )
        if taxonomy is not None and entry.class_id not in taxonomy:
            msg = f"line {line_no}: frame {frame_index} box {i} has unknown class_id {entry.class_id}"
            if strict:
                raise ManifestError(msg)
            log.warning(msg)
        boxes.append(entry)
    return FrameRecord(
        image_path=image_path,
        width=width,
        height=height,
        capture_time=raw.get("capture_time"),
        pose=pose,
        boxes=boxes,
    )


def load_annotations(
    path: str | Path,
    taxonomy: Taxonomy | None = None,
    strict: bool = False,
) -> SequenceManifest:
    """Load a JSON Lines annotation/detection file.

    When a taxonomy is given, unknown class ids are warnings, or errors
    with strict=True.
    """
    frames: list[FrameRecord] = []
    capture_rate = None
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as e:
                raise ManifestError(f"line {line_no}: invalid JSON: {e}") from None
            if capture_rate is None:
                if raw.get("format") != FORMAT_NAME:
                    raise ManifestError(
                        f"line {line_no}: expected header with format={FORMAT_NAME!r}, "
                        f"got {raw.get('format')!r}"
                    )
                if raw.get("version") != FORMAT_VERSION:
                    raise ManifestError(
                        f"line {line_no}: unsupported version {raw.get('version')!r}"
                    )
                capture_rate = raw.get("capture_rate", 2.0)
                continue
            frames.append(_parse_frame(raw, line_no, len(frames), taxonomy, strict))
    if capture_rate is None:
        raise ManifestError("file is empty; expected a header line")
    return SequenceManifest(frames=frames, capture_rate=capture_rate)


def decimate(seq: SequenceManifest, target_rate: float) -> SequenceManifest:
    """Keep every k-th frame, k = round(capture_rate / target_rate)."""
    if target_rate <= 0:
        raise ValueError(f"target_rate must be positive, got {target_rate}")
    if target_rate > seq.capture_rate:
        raise ValueError(
            f"target_rate {target_rate} exceeds capture_rate {seq.capture_rate}"
        )
    k = round(seq.capture_rate / target_rate)
    return SequenceManifest(
        frames=[replace(f, boxes=list(f.boxes)) for f in seq.frames[::k]],
        capture_rate=seq.capture_rate / k,
    )


@dataclass
class DatasetStats:
    frame_count: int
    box_count: int
    per_class: dict[int, int]
    per_category: dict[str, int]
    min_boxes_per_frame: int
    max_boxes_per_frame: int
    mean_boxes_per_frame: float


def dataset_stats(manifest: SequenceManifest, taxonomy: Taxonomy) -> DatasetStats:
    """Box counts keyed by class and by report category, plus frame summary."""
    per_class: dict[int, int] = {}
    per_category: dict[str, int] = {}
    per_frame: list[int] = []
    for frame in manifest.frames:
        per_frame.append(len(frame.boxes))
        for entry in frame.boxes:
            per_class[entry.class_id] = per_class.get(entry.class_id, 0) + 1
            if entry.class_id in taxonomy:
                cat = taxonomy.rollup(entry.class_id)
                per_category[cat] = per_category.get(cat, 0) + 1
    n_frames = len(manifest.frames)
    total = sum(per_frame)
    return DatasetStats(
        frame_count=n_frames,
        box_count=total,
        per_class=dict(sorted(per_class.items())),
        per_category=dict(sorted(per_category.items())),
        min_boxes_per_frame=min(per_frame) if per_frame else 0,
        max_boxes_per_frame=max(per_frame) if per_frame else 0,
        mean_boxes_per_frame=total / n_frames if n_frames else 0.0,
    )


def iter_category_boxes(
    frame: FrameRecord, taxonomy: Taxonomy
) -> Iterable[tuple[str, BoxEntry]]:
    """Yield (report_category, entry) pairs, skipping unknown class ids."""
    for entry in frame.boxes:
        if entry.class_id in taxonomy:
            yield taxonomy.rollup(entry.class_id), entry
