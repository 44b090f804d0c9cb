"""Independent reference implementations used to cross-check the package.

Everything here is deliberately naive: rasterize rectangles into pixel
arrays or scan every candidate exhaustively. None of the package geometry
code is reused, so agreement between the two is meaningful. Boxes are
plain (x, y, w, h) tuples with half-open integer extents.
"""

from __future__ import annotations

import numpy as np

Box = tuple[int, int, int, int]


def raster(box: Box, width: int, height: int) -> np.ndarray:
    m = np.zeros((height, width), dtype=bool)
    x, y, w, h = box
    m[y : y + h, x : x + w] = True
    return m


def _canvas(a: Box, b: Box) -> tuple[int, int]:
    return max(a[0] + a[2], b[0] + b[2]), max(a[1] + a[3], b[1] + b[3])


def raster_intersection(a: Box, b: Box) -> int:
    w, h = _canvas(a, b)
    return int((raster(a, w, h) & raster(b, w, h)).sum())


def raster_union(a: Box, b: Box) -> int:
    w, h = _canvas(a, b)
    return int((raster(a, w, h) | raster(b, w, h)).sum())


def raster_iou(a: Box, b: Box) -> float:
    inter = raster_intersection(a, b)
    union = raster_union(a, b)
    return inter / union if union else 0.0


def inline_iou(a: Box, b: Box) -> float:
    """Analytic IoU written from the definition, for the matching oracle."""
    ix = min(a[0] + a[2], b[0] + b[2]) - max(a[0], b[0])
    iy = min(a[1] + a[3], b[1] + b[3]) - max(a[1], b[1])
    inter = ix * iy if ix > 0 and iy > 0 else 0
    union = a[2] * a[3] + b[2] * b[3] - inter
    return inter / union


def greedy_match_reference(
    dets: list[tuple[float, Box]], gts: list[Box], iou_threshold: float = 0.5
) -> tuple[int, int]:
    """Greedy matching re-derived from its written rule; returns (CD, FP).

    Detections visited by descending score, ties by box (y, x, w, h);
    each claims the free ground truth with the highest IoU >= threshold,
    lowest index on ties.
    """
    order = sorted(
        range(len(dets)),
        key=lambda i: (-dets[i][0], dets[i][1][1], dets[i][1][0], dets[i][1][2], dets[i][1][3]),
    )
    free = list(range(len(gts)))
    cd = 0
    for i in order:
        best = None
        best_v = -1.0
        for g in free:
            v = inline_iou(dets[i][1], gts[g])
            if v >= iou_threshold and v > best_v:
                best, best_v = g, v
        if best is not None:
            free.remove(best)
            cd += 1
    return cd, len(dets) - cd


def cells_touching_all(boxes: list[Box], cols: int, rows: int, cell: int) -> list[list[int]]:
    """Box indices per cell by testing every (box, cell) pair for overlap."""
    out: list[list[int]] = [[] for _ in range(rows * cols)]
    for r in range(rows):
        for c in range(cols):
            cx, cy = c * cell, r * cell
            for i, (x, y, w, h) in enumerate(boxes):
                ix = min(x + w, cx + cell) - max(x, cx)
                iy = min(y + h, cy + cell) - max(y, cy)
                if ix > 0 and iy > 0:
                    out[r * cols + c].append(i)
    return out


def coverage_complete(
    origins_x: list[int], origins_y: list[int], win_w: int, win_h: int, frame_w: int, frame_h: int
) -> bool:
    """Every frame pixel inside at least one window placement."""
    covered = np.zeros((frame_h, frame_w), dtype=bool)
    for oy in origins_y:
        for ox in origins_x:
            if ox < 0 or oy < 0 or ox + win_w > frame_w or oy + win_h > frame_h:
                return False
            covered[oy : oy + win_h, ox : ox + win_w] = True
    return bool(covered.all())


def pixel_pr_reference(
    det_boxes: list[Box], gt_boxes: list[Box], width: int, height: int
) -> tuple[float | None, float | None]:
    """Pixel-mask precision/recall by explicit mask construction."""
    d = np.zeros((height, width), dtype=bool)
    g = np.zeros((height, width), dtype=bool)
    for x, y, w, h in det_boxes:
        d[y : y + h, x : x + w] = True
    for x, y, w, h in gt_boxes:
        g[y : y + h, x : x + w] = True
    both = int((d & g).sum())
    nd, ng = int(d.sum()), int(g.sum())
    return (both / nd if nd else None, both / ng if ng else None)
