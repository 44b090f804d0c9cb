"""Ground projection, geo-referencing, and per-category density grids.

The camera faces the ground from a few meters up, so the projection is a
plain linear map from pixels to a ground footprint parameterized directly
in meters. Geodesy uses a local tangent approximation with fixed
meters-per-degree constants, which is adequate at street scale away from
the poles.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from litterscan.geometry import BoundingBox
from litterscan.tiling import FrameSpec

M_PER_DEG_LAT = 111_320.0
MAX_ABS_LAT = 85.0

DEFAULT_CAMERA_HEIGHT_M = 3.0
DEFAULT_SWATH_WIDTH_M = 5.0
DEFAULT_SPEED_KMH = 12.0
DEFAULT_CAPTURE_FPS = 2.0
DEFAULT_FRAME_OVERLAP = 0.15
DEFAULT_CELL_SIZE_M = 10.0


def swath_length_from_motion(
    speed_kmh: float = DEFAULT_SPEED_KMH,
    fps: float = DEFAULT_CAPTURE_FPS,
    frame_overlap: float = DEFAULT_FRAME_OVERLAP,
) -> float:
    """Along-track footprint length implied by vehicle speed and frame rate.

    Consecutive frames advance speed/fps meters; dividing by (1 - overlap)
    recovers the full footprint length that makes them overlap by that
    fraction.
    """
    if fps <= 0:
        raise ValueError("fps must be positive")
    if not 0.0 <= frame_overlap < 1.0:
        raise ValueError("frame_overlap must be in [0, 1)")
    return (speed_kmh * 1000.0 / 3600.0) / fps / (1.0 - frame_overlap)


@dataclass(frozen=True)
class GeoPose:
    """WGS84 position plus heading in degrees clockwise from north."""

    lat: float
    lon: float
    heading_deg: float = 0.0

    def __post_init__(self) -> None:
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"lat {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"lon {self.lon} outside [-180, 180]")


@dataclass(frozen=True)
class CameraFootprint:
    """Ground rectangle imaged by one frame, in meters."""

    frame: FrameSpec
    height_m: float = DEFAULT_CAMERA_HEIGHT_M
    swath_width_m: float = DEFAULT_SWATH_WIDTH_M
    swath_length_m: float = field(default_factory=swath_length_from_motion)

    def __post_init__(self) -> None:
        if self.height_m <= 0 or self.swath_width_m <= 0 or self.swath_length_m <= 0:
            raise ValueError("footprint lengths must be positive")


def pixel_to_ground(px: float, py: float, fp: CameraFootprint) -> tuple[float, float]:
    """Map a frame pixel to (across_m, along_m) offsets from the frame center.

    Across is positive toward +x (vehicle right), along is positive toward
    -y (vehicle forward); the frame center maps to (0, 0).
    """
    if not (0 <= px <= fp.frame.width and 0 <= py <= fp.frame.height):
        raise ValueError(f"pixel ({px}, {py}) outside frame {fp.frame.width}x{fp.frame.height}")
    across = (px / fp.frame.width - 0.5) * fp.swath_width_m
    along = (0.5 - py / fp.frame.height) * fp.swath_length_m
    return across, along


def ground_to_geo(offsets: tuple[float, float], pose: GeoPose) -> GeoPose:
    """Shift a pose by (across_m, along_m) ground offsets in its heading frame."""
    if abs(pose.lat) > MAX_ABS_LAT:
        raise ValueError(f"local tangent approximation invalid at lat {pose.lat}")
    across, along = offsets
    h = math.radians(pose.heading_deg)
    east = across * math.cos(h) + along * math.sin(h)
    north = -across * math.sin(h) + along * math.cos(h)
    lat = pose.lat + north / M_PER_DEG_LAT
    lon = pose.lon + east / (M_PER_DEG_LAT * math.cos(math.radians(pose.lat)))
    return GeoPose(lat=lat, lon=lon, heading_deg=pose.heading_deg)


def geo_to_ground(point: GeoPose, pose: GeoPose) -> tuple[float, float]:
    """Inverse of ground_to_geo: offsets of ``point`` in ``pose``'s heading frame."""
    if abs(pose.lat) > MAX_ABS_LAT:
        raise ValueError(f"local tangent approximation invalid at lat {pose.lat}")
    north = (point.lat - pose.lat) * M_PER_DEG_LAT
    east = (point.lon - pose.lon) * M_PER_DEG_LAT * math.cos(math.radians(pose.lat))
    h = math.radians(pose.heading_deg)
    across = east * math.cos(h) - north * math.sin(h)
    along = east * math.sin(h) + north * math.cos(h)
    return across, along


def locate_box(box: BoundingBox, pose: GeoPose, fp: CameraFootprint) -> GeoPose:
    """Geo-reference a detection box by projecting its center pixel."""
    cx = box.x + box.w / 2.0
    cy = box.y + box.h / 2.0
    return ground_to_geo(pixel_to_ground(cx, cy, fp), pose)


@dataclass
class DensityGrid:
    """Sparse east/north-aligned grid of per-category detection counts."""

    origin: GeoPose
    cell_size_m: float = DEFAULT_CELL_SIZE_M
    cells: dict[tuple[int, int], dict[str, int]] = field(default_factory=dict)

    def add(self, category: str, point: GeoPose) -> None:
        east, north = geo_to_ground(point, GeoPose(self.origin.lat, self.origin.lon))
        key = (math.floor(east / self.cell_size_m), math.floor(north / self.cell_size_m))
        counts = self.cells.setdefault(key, {})
        counts[category] = counts.get(category, 0) + 1

    def total(self) -> int:
        return sum(sum(c.values()) for c in self.cells.values())

    def category_total(self, category: str) -> int:
        return sum(c.get(category, 0) for c in self.cells.values())


def accumulate_density(
    detections: Iterable[tuple[str, GeoPose]],
    origin: GeoPose,
    cell_size_m: float = DEFAULT_CELL_SIZE_M,
) -> DensityGrid:
    """Bin geo-referenced (category, position) detections into a density grid."""
    if cell_size_m <= 0:
        raise ValueError("cell_size_m must be positive")
    grid = DensityGrid(origin=origin, cell_size_m=cell_size_m)
    for category, point in detections:
        grid.add(category, point)
    return grid


def export_geojson(grid: DensityGrid) -> dict:
    """Render the grid as an RFC 7946 FeatureCollection of cell polygons."""
    anchor = GeoPose(grid.origin.lat, grid.origin.lon)
    features = []
    for (ix, iy), counts in sorted(grid.cells.items()):
        w = ix * grid.cell_size_m
        e = (ix + 1) * grid.cell_size_m
        s = iy * grid.cell_size_m
        n = (iy + 1) * grid.cell_size_m
        # Counterclockwise exterior ring per the GeoJSON right-hand rule.
        corners = [(w, s), (e, s), (e, n), (w, n), (w, s)]
        ring = []
        for east, north in corners:
            p = ground_to_geo((east, north), anchor)
            ring.append([p.lon, p.lat])
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Polygon", "coordinates": [ring]},
                "properties": {
                    **dict(sorted(counts.items())),
                    "total": sum(counts.values()),
                    "cell_size_m": grid.cell_size_m,
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}


def save_geojson(grid: DensityGrid, path: str | Path) -> None:
    Path(path).write_text(json.dumps(export_geojson(grid), indent=2) + "\n", encoding="utf-8")
