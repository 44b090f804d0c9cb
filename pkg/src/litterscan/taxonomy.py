"""Waste class definitions and the class-to-report-category rollup.

A *class* is a training label (integer id); a *report category* is the
bucket used for cleanliness reporting. Several classes may roll up to the
same category, e.g. single leaves and piles of leaves both report as
"Leaves".
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import IO, Iterator

DEFAULT_MAX_CLASSES = 25


@dataclass(frozen=True)
class WasteClass:
    class_id: int
    name: str
    report_category: str


@dataclass(frozen=True)
class Taxonomy:
    classes: tuple[WasteClass, ...]

    @cached_property
    def _by_id(self) -> dict[int, WasteClass]:
        return {c.class_id: c for c in self.classes}

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self) -> Iterator[WasteClass]:
        return iter(self.classes)

    def __contains__(self, class_id: int) -> bool:
        return class_id in self._by_id

    def get(self, class_id: int) -> WasteClass:
        try:
            return self._by_id[class_id]
        except KeyError:
            raise ValueError(f"unknown class_id {class_id}") from None

    def rollup(self, class_id: int) -> str:
        """Report category for a class id; raises ValueError when unknown."""
        return self.get(class_id).report_category

    def report_categories(self) -> list[str]:
        """Distinct report categories in taxonomy order."""
        seen: dict[str, None] = {}
        for c in self.classes:
            seen.setdefault(c.report_category, None)
        return list(seen)


def _validate(entries: list[WasteClass], max_classes: int) -> Taxonomy:
    if len(entries) > max_classes:
        raise ValueError(f"taxonomy has {len(entries)} classes, limit is {max_classes}")
    seen: set[int] = set()
    for c in entries:
        if not isinstance(c.class_id, int) or isinstance(c.class_id, bool):
            raise ValueError(f"class_id must be an integer, got {c.class_id!r}")
        if not 1 <= c.class_id <= max_classes:
            raise ValueError(f"class_id {c.class_id} outside [1, {max_classes}]")
        if c.class_id in seen:
            raise ValueError(f"duplicate class_id {c.class_id}")
        seen.add(c.class_id)
        if not c.name:
            raise ValueError(f"class {c.class_id} has an empty name")
        if not c.report_category:
            raise ValueError(f"class {c.class_id} has an empty report_category")
    return Taxonomy(classes=tuple(entries))


def load_taxonomy(source: str | Path | IO[str], max_classes: int = DEFAULT_MAX_CLASSES) -> Taxonomy:
    """Load and validate a taxonomy from a JSON document.

    The document is a top-level list of
    ``{"class_id": int, "name": str, "report_category": str}`` objects.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"taxonomy is not valid JSON: {e}") from e
    if not isinstance(raw, list):
        raise ValueError("taxonomy document must be a JSON list")
    entries = []
    for item in raw:
        if not isinstance(item, dict):
            raise ValueError(f"taxonomy entry is not an object: {item!r}")
        try:
            entries.append(
                WasteClass(
                    class_id=item["class_id"],
                    name=item["name"],
                    report_category=item["report_category"],
                )
            )
        except KeyError as e:
            raise ValueError(f"taxonomy entry missing field {e}: {item!r}") from None
    return _validate(entries, max_classes)


def save_taxonomy(taxonomy: Taxonomy, path: str | Path) -> None:
    doc = [
        {"class_id": c.class_id, "name": c.name, "report_category": c.report_category}
        for c in taxonomy.classes
    ]
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def default_taxonomy() -> Taxonomy:
    """The 25-class taxonomy shipped with the package."""
    with resources.files("litterscan").joinpath("data/default_taxonomy.json").open(
        "r", encoding="utf-8"
    ) as f:
        return load_taxonomy(f)
