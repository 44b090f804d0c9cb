"""Axis-aligned rectangle arithmetic shared by every other module.

Boxes use integer pixel coordinates with a top-left origin and half-open
extents [x, x+w) x [y, y+h), so adjacent boxes sharing an edge do not
intersect and pixel-rasterization oracles agree with the analytic math
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class BoundingBox:
    """Axis-aligned pixel rectangle: top-left corner plus size."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self) -> None:
        if self.w < 1 or self.h < 1:
            raise ValueError(f"box width and height must be >= 1, got {self.w}x{self.h}")

    @property
    def x2(self) -> int:
        """Exclusive right edge."""
        return self.x + self.w

    @property
    def y2(self) -> int:
        """Exclusive bottom edge."""
        return self.y + self.h

    @property
    def area(self) -> int:
        return self.w * self.h

    def translate(self, dx: int, dy: int) -> BoundingBox:
        return BoundingBox(self.x + dx, self.y + dy, self.w, self.h)

    def contains(self, other: BoundingBox) -> bool:
        """True when ``other`` lies fully inside this box."""
        return (
            self.x <= other.x
            and self.y <= other.y
            and other.x2 <= self.x2
            and other.y2 <= self.y2
        )


def intersection_area(a: BoundingBox, b: BoundingBox) -> int:
    """Area of the geometric intersection; 0 when disjoint."""
    iw = min(a.x2, b.x2) - max(a.x, b.x)
    ih = min(a.y2, b.y2) - max(a.y, b.y)
    if iw <= 0 or ih <= 0:
        return 0
    return iw * ih


def intersect_box(a: BoundingBox, b: BoundingBox) -> BoundingBox | None:
    """The intersection rectangle, or None when the boxes are disjoint."""
    x1 = max(a.x, b.x)
    y1 = max(a.y, b.y)
    x2 = min(a.x2, b.x2)
    y2 = min(a.y2, b.y2)
    if x2 <= x1 or y2 <= y1:
        return None
    return BoundingBox(x1, y1, x2 - x1, y2 - y1)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union in [0, 1]."""
    inter = intersection_area(a, b)
    if inter == 0:
        return 0.0
    return inter / (a.area + b.area - inter)


def overlap_over_smaller(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over the smaller box's area in [0, 1].

    More forgiving than IoU when one box is a fragment of the other, e.g.
    tile-boundary clips of a single object.
    """
    inter = intersection_area(a, b)
    if inter == 0:
        return 0.0
    return inter / min(a.area, b.area)


def union_box(a: BoundingBox, b: BoundingBox) -> BoundingBox:
    """Smallest box containing both inputs."""
    x1 = min(a.x, b.x)
    y1 = min(a.y, b.y)
    x2 = max(a.x2, b.x2)
    y2 = max(a.y2, b.y2)
    return BoundingBox(x1, y1, x2 - x1, y2 - y1)
