"""Street-litter detection toolkit: tiling, detection fusion, evaluation, density maps."""

__version__ = "0.1.0"

from litterscan.geometry import BoundingBox, intersection_area, iou, union_box
from litterscan.detect import Detection
from litterscan.taxonomy import Taxonomy, WasteClass, default_taxonomy, load_taxonomy

__all__ = [
    "BoundingBox",
    "Detection",
    "Taxonomy",
    "WasteClass",
    "default_taxonomy",
    "intersection_area",
    "iou",
    "load_taxonomy",
    "union_box",
]
