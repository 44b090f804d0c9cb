"""Annotation backend: REST API over a manifest file plus the browser client.

Reads are concurrent; writes are serialized under a lock with last-write
wins per frame, guarded by optimistic per-frame version numbers. A PUT
carrying a stale version gets a 409 and changes nothing. The manifest
file on disk is rewritten atomically after every accepted write.
"""

from __future__ import annotations

import mimetypes
import os
import tempfile
import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse, HTMLResponse, Response
from fastapi.staticfiles import StaticFiles

from litterscan.dataset import (
    BoxEntry,
    SequenceManifest,
    load_annotations,
    save_annotations,
)
from litterscan.geometry import BoundingBox
from litterscan.taxonomy import Taxonomy, default_taxonomy

FALLBACK_INDEX = """<!doctype html>
<html><head><title>litterscan annotator</title></head>
<body><h1>litterscan annotation backend</h1>
<p>The browser client is not built. Build the frontend and pass its dist
directory via --assets, or use the API directly under /api.</p>
</body></html>
"""


class AnnotationStore:
    """Manifest plus per-frame optimistic versions, persisted on every write."""

    def __init__(self, manifest_path: str | Path, taxonomy: Taxonomy):
        self.path = Path(manifest_path)
        self.taxonomy = taxonomy
        self.manifest: SequenceManifest = load_annotations(self.path, taxonomy)
        self.versions = [1] * len(self.manifest.frames)
        self._lock = threading.Lock()

    def frame_payload(self, index: int) -> dict:
        frame = self.manifest.frames[index]
        return {
            "index": index,
            "image_path": frame.image_path,
            "width": frame.width,
            "height": frame.height,
            "boxes": [
                {
                    "class_id": b.class_id,
                    "x": b.box.x,
                    "y": b.box.y,
                    "w": b.box.w,
                    "h": b.box.h,
                    **({"score": b.score} if b.score is not None else {}),
                }
                for b in frame.boxes
            ],
            "version": self.versions[index],
        }

    def put_boxes(self, index: int, boxes: list[dict], version: int) -> int:
        frame = self.manifest.frames[index]
        entries = []
        for i, raw in enumerate(boxes):
            try:
                box = BoundingBox(x=raw["x"], y=raw["y"], w=raw["w"], h=raw["h"])
                entry = BoxEntry(class_id=raw["class_id"], box=box, score=raw.get("score"))
            except (KeyError, TypeError, ValueError) as e:
                raise HTTPException(status_code=400, detail=f"box {i} is invalid: {e}")
            if box.x < 0 or box.y < 0 or box.x2 > frame.width or box.y2 > frame.height:
                raise HTTPException(
                    status_code=400,
                    detail=f"box {i} outside frame {frame.width}x{frame.height}",
                )
            if entry.class_id not in self.taxonomy:
                raise HTTPException(
                    status_code=400, detail=f"box {i} has unknown class_id {entry.class_id}"
                )
            entries.append(entry)
        with self._lock:
            if version != self.versions[index]:
                raise HTTPException(
                    status_code=409,
                    detail={
                        "error": "version_conflict",
                        "current_version": self.versions[index],
                    },
                )
            frame.boxes = entries
            self.versions[index] += 1
            self._save()
            return self.versions[index]

    def _save(self) -> None:
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, suffix=".tmp")
        os.close(fd)
        try:
            save_annotations(self.manifest, tmp)
            os.replace(tmp, self.path)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)


def create_app(
    manifest_path: str | Path,
    taxonomy: Taxonomy | None = None,
    images_root: str | Path | None = None,
    assets_dir: str | Path | None = None,
) -> FastAPI:
    taxonomy = taxonomy or default_taxonomy()
    store = AnnotationStore(manifest_path, taxonomy)
    images_root = Path(images_root) if images_root else Path(manifest_path).parent
    app = FastAPI(title="litterscan annotator")
    app.state.store = store

    def check_index(index: int) -> None:
        if not 0 <= index < len(store.manifest.frames):
            raise HTTPException(status_code=404, detail=f"no frame {index}")

    @app.get("/api/manifest")
    def get_manifest() -> dict:
        return {
            "capture_rate": store.manifest.capture_rate,
            "frames": [
                {
                    "index": i,
                    "image_path": f.image_path,
                    "width": f.width,
                    "height": f.height,
                    "box_count": len(f.boxes),
                }
                for i, f in enumerate(store.manifest.frames)
            ],
            "taxonomy": [
                {"class_id": c.class_id, "name": c.name, "report_category": c.report_category}
                for c in taxonomy
            ],
        }

    @app.get("/api/frames/{index}")
    def get_frame(index: int) -> dict:
        check_index(index)
        return store.frame_payload(index)

    @app.put("/api/frames/{index}/boxes")
    def put_frame_boxes(index: int, payload: dict) -> dict:
        check_index(index)
        if "boxes" not in payload or "version" not in payload:
            raise HTTPException(status_code=400, detail="payload needs 'boxes' and 'version'")
        new_version = store.put_boxes(index, payload["boxes"], payload["version"])
        return {"version": new_version}

    @app.get("/api/images/{index}")
    def get_image(index: int) -> Response:
        check_index(index)
        path = images_root / store.manifest.frames[index].image_path
        if not path.exists():
            raise HTTPException(status_code=404, detail=f"image not found: {path.name}")
        media_type = mimetypes.guess_type(str(path))[0] or "application/octet-stream"
        return FileResponse(path, media_type=media_type)

    assets = Path(assets_dir) if assets_dir else None
    if assets is not None and assets.is_dir():
        app.mount("/ui", StaticFiles(directory=assets), name="ui")

        @app.get("/", include_in_schema=False)
        def index() -> FileResponse:
            return FileResponse(assets / "index.html", media_type="text/html")

    else:

        @app.get("/", include_in_schema=False)
        def index_fallback() -> HTMLResponse:
            return HTMLResponse(FALLBACK_INDEX)

    return app


def serve_annotations(
    manifest_path: str | Path,
    bind: str = "127.0.0.1:8000",
    taxonomy: Taxonomy | None = None,
    images_root: str | Path | None = None,
    assets_dir: str | Path | None = None,
) -> None:
    """Run the annotation backend until interrupted."""
    import uvicorn

    host, _, port = bind.rpartition(":")
    app = create_app(manifest_path, taxonomy, images_root, assets_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
