"""Sliding-window placement over a full frame.

Tiles are spaced evenly per axis from 0 to L-w (last origin pinned to L-w)
rather than stepped at a fixed stride, which avoids a ragged final tile.
The per-axis count guarantees every frame pixel falls inside at least one
tile for any min_overlap in [0, 1).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Iterator

from litterscan.geometry import BoundingBox, intersection_area

if TYPE_CHECKING:
    from litterscan.detect import Detection

DEFAULT_FRAME = (1920, 1480)
DEFAULT_WINDOW = (640, 480)
DEFAULT_MIN_OVERLAP = 0.15


@dataclass(frozen=True)
class FrameSpec:
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"frame dimensions must be >= 1, got {self.width}x{self.height}")


@dataclass(frozen=True)
class WindowSpec:
    width: int = DEFAULT_WINDOW[0]
    height: int = DEFAULT_WINDOW[1]
    min_overlap: float = DEFAULT_MIN_OVERLAP

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"window dimensions must be >= 1, got {self.width}x{self.height}")
        if not 0.0 <= self.min_overlap < 1.0:
            raise ValueError(f"min_overlap must be in [0, 1), got {self.min_overlap}")


@dataclass(frozen=True)
class Tile:
    tile_id: int
    origin_x: int
    origin_y: int


@dataclass(frozen=True)
class TilePlan:
    frame: FrameSpec
    window: WindowSpec
    tiles: tuple[Tile, ...]

    def __len__(self) -> int:
        return len(self.tiles)

    def __iter__(self) -> Iterator[Tile]:
        return iter(self.tiles)

    def tile_box(self, tile_id: int) -> BoundingBox:
        """Extent of a tile in frame coordinates."""
        t = self.tiles[tile_id]
        return BoundingBox(t.origin_x, t.origin_y, self.window.width, self.window.height)

    def to_dict(self) -> dict:
        return {
            "frame": {"width": self.frame.width, "height": self.frame.height},
            "window": {
                "width": self.window.width,
                "height": self.window.height,
                "min_overlap": self.window.min_overlap,
            },
            "tiles": [
                {"tile_id": t.tile_id, "origin_x": t.origin_x, "origin_y": t.origin_y}
                for t in self.tiles
            ],
        }


def _axis_origins(length: int, win: int, min_overlap: float) -> list[int]:
    """Evenly spaced integer origins covering [0, length) with win-sized tiles."""
    if length == win:
        return [0]
    span = length - win
    count = max(2, math.ceil(span / (win * (1.0 - min_overlap))) + 1)
    spacing = span / (count - 1)
    # Explicit half-up rounding keeps consecutive origins at most
    # ceil(spacing) <= win apart, so coverage never develops a gap.
    return [int(i * spacing + 0.5) for i in range(count)]


def plan_tiles(frame: FrameSpec, window: WindowSpec) -> TilePlan:
    """Plan window placements covering the whole frame, row-major order."""
    if window.width > frame.width or window.height > frame.height:
        raise ValueError(
            f"window {window.width}x{window.height} larger than frame "
            f"{frame.width}x{frame.height}"
        )
    xs = _axis_origins(frame.width, window.width, window.min_overlap)
    ys = _axis_origins(frame.height, window.height, window.min_overlap)
    tiles = tuple(
        Tile(tile_id=r * len(xs) + c, origin_x=x, origin_y=y)
        for r, y in enumerate(ys)
        for c, x in enumerate(xs)
    )
    return TilePlan(frame=frame, window=window, tiles=tiles)


def tile_to_frame(det: Detection, tile: Tile, window: WindowSpec) -> Detection:
    """Translate a tile-coordinate detection into frame coordinates."""
    box = det.box
    if box.x < 0 or box.y < 0 or box.x2 > window.width or box.y2 > window.height:
        raise ValueError(
            f"detection box {box} exceeds window extent {window.width}x{window.height}"
        )
    return det.with_box(box.translate(tile.origin_x, tile.origin_y))


def tiles_intersecting(box: BoundingBox, plan: TilePlan) -> list[int]:
    """Ids of all tiles whose extent has positive intersection with the box."""
    return [t.tile_id for t in plan.tiles if intersection_area(box, plan.tile_box(t.tile_id)) > 0]


def save_plan(plan: TilePlan, path: str | Path) -> None:
    Path(path).write_text(json.dumps(plan.to_dict(), indent=2) + "\n", encoding="utf-8")
