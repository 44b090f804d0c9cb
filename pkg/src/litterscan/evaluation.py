"""Precision/recall evaluation: greedy box matching and pixel-mask comparison.

Box matching is greedy by descending score with deterministic tie-breaks:
each detection claims the unmatched ground truth of highest IoU at or
above the threshold. The pixel-mask method rasterizes detections and
ground truth into binary masks and compares them pixel by pixel; it suits
mass-like categories (e.g. leaves) where box positions are arbitrary.

Undefined precision (no detections) and undefined recall (no ground
truth) are reported as None, never silently coerced to 0 or 1.

Multi-frame aggregation sums counts (CD, FP, N, or pixels) across frames
before dividing.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from litterscan.dataset import FrameRecord, iter_category_boxes
from litterscan.detect import Detection
from litterscan.geometry import BoundingBox, iou
from litterscan.taxonomy import Taxonomy
from litterscan.tiling import FrameSpec

DEFAULT_IOU_THRESHOLD = 0.5
DEFAULT_SCORE_THRESHOLDS = tuple(i / 10 for i in range(10))

METHOD_BOX = "box"
METHOD_PIXEL = "pixel"


@dataclass
class MatchResult:
    correct: int
    false_positives: int
    gt_count: int
    matched_pairs: list[tuple[int, int]] = field(default_factory=list)


@dataclass(frozen=True)
class PRPoint:
    threshold: float
    precision: float | None
    recall: float | None


def match_detections(
    dets: Sequence[Detection],
    gts: Sequence[BoundingBox],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> MatchResult:
    """Greedily match detections to ground truth boxes of the same category.

    Detections are visited by descending score (ties broken by box
    coordinates); each claims the free ground truth with the highest IoU
    >= threshold, lowest index on IoU ties. Claimed detections count as
    correct, the rest as false positives.
    """
    def det_key(i: int) -> tuple:
        b = dets[i].box
        return (-dets[i].score, b.y, b.x, b.w, b.h)

    order = sorted(range(len(dets)), key=det_key)
    claimed = [False] * len(gts)
    pairs: list[tuple[int, int]] = []
    for di in order:
        best_gi = -1
        best_iou = -1.0
        for gi, gt in enumerate(gts):
            if claimed[gi]:
                continue
            v = iou(dets[di].box, gt)
            if v >= iou_threshold and v > best_iou:
                best_iou = v
                best_gi = gi
        if best_gi >= 0:
            claimed[best_gi] = True
            pairs.append((di, best_gi))
    pairs.sort()
    return MatchResult(
        correct=len(pairs),
        false_positives=len(dets) - len(pairs),
        gt_count=len(gts),
        matched_pairs=pairs,
    )


def precision_recall(m: MatchResult) -> tuple[float | None, float | None]:
    """P = CD/(CD+FP), R = CD/N; None where the denominator is zero."""
    evaluated = m.correct + m.false_positives
    precision = m.correct / evaluated if evaluated > 0 else None
    recall = m.correct / m.gt_count if m.gt_count > 0 else None
    return precision, recall


def pr_curve(
    frames: Sequence[tuple[Sequence[Detection], Sequence[BoundingBox]]],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    thresholds: Sequence[float] = DEFAULT_SCORE_THRESHOLDS,
) -> list[PRPoint]:
    """PR points over a score-threshold sweep, counts summed across frames."""
    if any(b >= a for a, b in zip(thresholds[1:], thresholds)):
        raise ValueError("thresholds must be strictly increasing")
    points = []
    for t in thresholds:
        cd = fp = n = 0
        for dets, gts in frames:
            kept = [d for d in dets if d.score >= t]
            m = match_detections(kept, gts, iou_threshold)
            cd += m.correct
            fp += m.false_positives
            n += m.gt_count
        p, r = precision_recall(MatchResult(correct=cd, false_positives=fp, gt_count=n))
        points.append(PRPoint(threshold=t, precision=p, recall=r))
    return points


def _rasterize(boxes: Sequence[BoundingBox], frame: FrameSpec) -> np.ndarray:
    mask = np.zeros((frame.height, frame.width), dtype=bool)
    for b in boxes:
        if b.x < 0 or b.y < 0 or b.x2 > frame.width or b.y2 > frame.height:
            raise ValueError(f"box {b} outside frame {frame.width}x{frame.height}")
        mask[b.y : b.y2, b.x : b.x2] = True
    return mask


def pixel_mask_counts(
    det_boxes: Sequence[BoundingBox],
    gt_boxes: Sequence[BoundingBox],
    frame: FrameSpec,
) -> tuple[int, int, int]:
    """Pixel counts (detection AND gt, detection, gt) of the two binary masks."""
    det_mask = _rasterize(det_boxes, frame)
    gt_mask = _rasterize(gt_boxes, frame)
    both = int(np.count_nonzero(det_mask & gt_mask))
    return both, int(np.count_nonzero(det_mask)), int(np.count_nonzero(gt_mask))


def pixel_mask_pr(
    dets: Sequence[Detection],
    gts: Sequence[BoundingBox],
    frame: FrameSpec,
) -> tuple[float | None, float | None]:
    """Pixel-level precision/recall for one frame."""
    both, d, g = pixel_mask_counts([det.box for det in dets], gts, frame)
    precision = both / d if d > 0 else None
    recall = both / g if g > 0 else None
    return precision, recall


def pixel_mask_pr_curve(
    frames: Sequence[tuple[Sequence[Detection], Sequence[BoundingBox], FrameSpec]],
    thresholds: Sequence[float] = DEFAULT_SCORE_THRESHOLDS,
) -> list[PRPoint]:
    """Pixel-method PR sweep; pixel counts summed across frames per threshold."""
    if any(b >= a for a, b in zip(thresholds[1:], thresholds)):
        raise ValueError("thresholds must be strictly increasing")
    points = []
    for t in thresholds:
        both = d_total = g_total = 0
        for dets, gts, spec in frames:
            kept = [det.box for det in dets if det.score >= t]
            b, d, g = pixel_mask_counts(kept, gts, spec)
            both += b
            d_total += d
            g_total += g
        precision = both / d_total if d_total > 0 else None
        recall = both / g_total if g_total > 0 else None
        points.append(PRPoint(threshold=t, precision=precision, recall=recall))
    return points


@dataclass
class CategoryReport:
    name: str
    method: str
    points: list[PRPoint]
    correct: int
    false_positives: int
    gt_count: int


@dataclass
class EvalReport:
    per_category: list[CategoryReport]

    def to_dict(self) -> dict:
        return {
            "per_category": [
                {
                    "name": c.name,
                    "method": c.method,
                    "points": [
                        {"threshold": p.threshold, "precision": p.precision, "recall": p.recall}
                        for p in c.points
                    ],
                    "cd": c.correct,
                    "fp": c.false_positives,
                    "n": c.gt_count,
                }
                for c in self.per_category
            ]
        }

    def save_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    def save_csv(self, path: str | Path) -> None:
        """PR points as CSV; undefined values become empty fields."""
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["category", "threshold", "precision", "recall"])
            for c in self.per_category:
                for p in c.points:
                    writer.writerow(
                        [
                            c.name,
                            p.threshold,
                            "" if p.precision is None else p.precision,
                            "" if p.recall is None else p.recall,
                        ]
                    )


def _category_frames(
    det_frames: Sequence[FrameRecord],
    gt_frames: Sequence[FrameRecord],
    taxonomy: Taxonomy,
) -> dict[str, list[tuple[list[Detection], list[BoundingBox], FrameSpec]]]:
    categories = taxonomy.report_categories()
    out: dict[str, list[tuple[list[Detection], list[BoundingBox], FrameSpec]]] = {
        c: [] for c in categories
    }
    for det_frame, gt_frame in zip(det_frames, gt_frames):
        spec = FrameSpec(gt_frame.width, gt_frame.height)
        dets_by_cat: dict[str, list[Detection]] = {c: [] for c in categories}
        gts_by_cat: dict[str, list[BoundingBox]] = {c: [] for c in categories}
        for cat, entry in iter_category_boxes(det_frame, taxonomy):
            score = 1.0 if entry.score is None else entry.score
            dets_by_cat[cat].append(
                Detection(box=entry.box, class_id=entry.class_id, score=score)
            )
        for cat, entry in iter_category_boxes(gt_frame, taxonomy):
            gts_by_cat[cat].append(entry.box)
        for cat in categories:
            out[cat].append((dets_by_cat[cat], gts_by_cat[cat], spec))
    return out


def evaluate(
    det_frames: Sequence[FrameRecord],
    gt_frames: Sequence[FrameRecord],
    taxonomy: Taxonomy,
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    thresholds: Sequence[float] = DEFAULT_SCORE_THRESHOLDS,
    methods: dict[str, str] | None = None,
) -> EvalReport:
    """Full per-category report over paired detection/ground-truth frames.

    Evaluation operates on report categories (post-rollup). ``methods``
    selects the pixel-mask method per category; the default is box
    matching. Categories with no detections and no ground truth anywhere
    are omitted.
    """
    if len(det_frames) != len(gt_frames):
        raise ValueError(
            f"detection frames ({len(det_frames)}) and ground-truth frames "
            f"({len(gt_frames)}) differ in length"
        )
    methods = methods or {}
    by_cat = _category_frames(det_frames, gt_frames, taxonomy)
    reports = []
    for cat, frames in by_cat.items():
        if all(not dets and not gts for dets, gts, _ in frames):
            continue
        method = methods.get(cat, METHOD_BOX)
        if method == METHOD_PIXEL:
            points = pixel_mask_pr_curve(frames, thresholds)
            cd = fp = n = 0
            for dets, gts, spec in frames:
                b, d, g = pixel_mask_counts([det.box for det in dets], gts, spec)
                cd += b
                fp += d - b
                n += g
        elif method == METHOD_BOX:
            points = pr_curve([(dets, gts) for dets, gts, _ in frames], iou_threshold, thresholds)
            cd = fp = n = 0
            for dets, gts, _ in frames:
                m = match_detections(dets, gts, iou_threshold)
                cd += m.correct
                fp += m.false_positives
                n += m.gt_count
        else:
            raise ValueError(f"unknown evaluation method {method!r} for category {cat!r}")
        reports.append(
            CategoryReport(
                name=cat,
                method=method,
                points=points,
                correct=cd,
                false_positives=fp,
                gt_count=n,
            )
        )
    return EvalReport(per_category=reports)
