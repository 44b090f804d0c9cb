"""Fuses frame-coordinate detections across tiles.

Same-class detections whose pairwise overlap exceeds the threshold are
linked into connected components; each component collapses to one
detection spanning the component's union box with the component's best
score. Connected components make the result permutation-invariant, unlike
naive pairwise merging.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from litterscan.detect import Detection
from litterscan.geometry import BoundingBox, iou, overlap_over_smaller, union_box

DEFAULT_OVERLAP_THRESHOLD = 0.6

_MEASURES: dict[str, Callable[[BoundingBox, BoundingBox], float]] = {
    "iou": iou,
    "over_smaller": overlap_over_smaller,
}


@dataclass(frozen=True)
class MergeConfig:
    overlap_threshold: float = DEFAULT_OVERLAP_THRESHOLD
    overlap_measure: str = "iou"

    def __post_init__(self) -> None:
        if not 0.0 < self.overlap_threshold <= 1.0:
            raise ValueError(f"overlap_threshold {self.overlap_threshold} outside (0, 1]")
        if self.overlap_measure not in _MEASURES:
            raise ValueError(
                f"overlap_measure must be one of {sorted(_MEASURES)}, got {self.overlap_measure!r}"
            )

    @property
    def measure(self) -> Callable[[BoundingBox, BoundingBox], float]:
        return _MEASURES[self.overlap_measure]


def _find(parent: list[int], i: int) -> int:
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


def merge_detections(
    dets: Sequence[Detection], cfg: MergeConfig = MergeConfig()
) -> list[Detection]:
    """Collapse overlapping same-class detections into single detections.

    Output is sorted by (class_id, box) and never mixes classes.
    """
    measure = cfg.measure
    by_class: dict[int, list[Detection]] = {}
    for det in dets:
        by_class.setdefault(det.class_id, []).append(det)

    merged: list[Detection] = []
    for class_id in sorted(by_class):
        group = sorted(by_class[class_id], key=lambda d: (d.box, -d.score))
        parent = list(range(len(group)))
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                if measure(group[i].box, group[j].box) > cfg.overlap_threshold:
                    ri, rj = _find(parent, i), _find(parent, j)
                    if ri != rj:
                        parent[rj] = ri
        components: dict[int, list[Detection]] = {}
        for i, det in enumerate(group):
            components.setdefault(_find(parent, i), []).append(det)
        for members in components.values():
            box = members[0].box
            score = members[0].score
            for det in members[1:]:
                box = union_box(box, det.box)
                score = max(score, det.score)
            merged.append(Detection(box=box, class_id=class_id, score=score))

    merged.sort(key=lambda d: (d.class_id, d.box))
    return merged
