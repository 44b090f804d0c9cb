"""Annotation HTTP API: reads, optimistic-version writes, images, assets."""

import pytest

pytest.importorskip("fastapi")

from fastapi.testclient import TestClient

from litterscan.dataset import (
    BoxEntry,
    FrameRecord,
    SequenceManifest,
    load_annotations,
    save_annotations,
)
from litterscan.geometry import BoundingBox
from litterscan.server import create_app


def build_manifest() -> SequenceManifest:
    frames = [
        FrameRecord(
            image_path="frames/00000.png",
            width=640,
            height=480,
            boxes=[
                BoxEntry(class_id=1, box=BoundingBox(10, 10, 50, 40)),
                BoxEntry(class_id=3, box=BoundingBox(100, 200, 30, 30), score=0.75),
            ],
        ),
        FrameRecord(
            image_path="frames/00001.png",
            width=640,
            height=480,
            boxes=[BoxEntry(class_id=6, box=BoundingBox(5, 5, 20, 20))],
        ),
    ]
    return SequenceManifest(frames=frames, capture_rate=2.0)


@pytest.fixture
def manifest_path(tmp_path):
    path = tmp_path / "ann.jsonl"
    save_annotations(build_manifest(), path)
    return path


@pytest.fixture
def client(manifest_path):
    return TestClient(create_app(manifest_path))


class TestReads:
    def test_manifest_listing(self, client):
        r = client.get("/api/manifest")
        assert r.status_code == 200
        doc = r.json()
        assert doc["capture_rate"] == 2.0
        assert [f["box_count"] for f in doc["frames"]] == [2, 1]
        assert doc["frames"][0]["image_path"] == "frames/00000.png"
        ids = {c["class_id"] for c in doc["taxonomy"]}
        assert ids == set(range(1, 26))

    def test_frame_payload(self, client):
        r = client.get("/api/frames/0")
        assert r.status_code == 200
        doc = r.json()
        assert doc["index"] == 0
        assert doc["version"] == 1
        assert doc["boxes"][0] == {"class_id": 1, "x": 10, "y": 10, "w": 50, "h": 40}
        assert doc["boxes"][1]["score"] == 0.75

    def test_unknown_frame(self, client):
        assert client.get("/api/frames/5").status_code == 404
        assert client.get("/api/frames/-1").status_code == 404


class TestWrites:
    NEW_BOXES = [
        {"class_id": 2, "x": 0, "y": 0, "w": 25, "h": 25},
        {"class_id": 4, "x": 300, "y": 100, "w": 40, "h": 60, "score": 0.5},
    ]

    def test_accepted_write_bumps_version(self, client):
        r = client.put("/api/frames/0/boxes", json={"boxes": self.NEW_BOXES, "version": 1})
        assert r.status_code == 200
        assert r.json() == {"version": 2}
        doc = client.get("/api/frames/0").json()
        assert doc["version"] == 2
        assert doc["boxes"] == self.NEW_BOXES

    def test_write_persists_to_disk(self, client, manifest_path, tax):
        client.put("/api/frames/0/boxes", json={"boxes": self.NEW_BOXES, "version": 1})
        saved = load_annotations(manifest_path, tax)
        assert [(b.class_id, b.box) for b in saved.frames[0].boxes] == [
            (2, BoundingBox(0, 0, 25, 25)),
            (4, BoundingBox(300, 100, 40, 60)),
        ]
        assert saved.frames[0].boxes[1].score == 0.5
        # the untouched frame survives the rewrite
        assert [(b.class_id, b.box) for b in saved.frames[1].boxes] == [
            (6, BoundingBox(5, 5, 20, 20))
        ]

    def test_stale_version_rejected_without_changes(self, client, manifest_path, tax):
        assert client.put(
            "/api/frames/0/boxes", json={"boxes": self.NEW_BOXES, "version": 1}
        ).status_code == 200
        stale = client.put(
            "/api/frames/0/boxes",
            json={"boxes": [{"class_id": 5, "x": 1, "y": 1, "w": 2, "h": 2}], "version": 1},
        )
        assert stale.status_code == 409
        assert stale.json()["detail"] == {"error": "version_conflict", "current_version": 2}
        doc = client.get("/api/frames/0").json()
        assert doc["version"] == 2
        assert doc["boxes"] == self.NEW_BOXES
        saved = load_annotations(manifest_path, tax)
        assert len(saved.frames[0].boxes) == 2

    def test_versions_are_per_frame(self, client):
        client.put("/api/frames/0/boxes", json={"boxes": [], "version": 1})
        assert client.get("/api/frames/0").json()["version"] == 2
        assert client.get("/api/frames/1").json()["version"] == 1

    def test_sequential_writes(self, client):
        assert client.put(
            "/api/frames/0/boxes", json={"boxes": [], "version": 1}
        ).json() == {"version": 2}
        assert client.put(
            "/api/frames/0/boxes", json={"boxes": self.NEW_BOXES, "version": 2}
        ).json() == {"version": 3}

    @pytest.mark.parametrize(
        "box,hint",
        [
            ({"class_id": 1, "x": 0, "y": 0, "w": 0, "h": 5}, "invalid"),
            ({"class_id": 1, "x": 0, "y": 0, "w": 5}, "invalid"),
            ({"class_id": 1, "x": 630, "y": 0, "w": 20, "h": 5}, "outside frame"),
            ({"class_id": 99, "x": 0, "y": 0, "w": 5, "h": 5}, "unknown class_id"),
        ],
    )
    def test_bad_boxes_rejected(self, client, box, hint):
        r = client.put("/api/frames/0/boxes", json={"boxes": [box], "version": 1})
        assert r.status_code == 400
        assert "box 0" in r.json()["detail"]
        assert hint in r.json()["detail"]
        # nothing changed
        assert client.get("/api/frames/0").json()["version"] == 1

    def test_payload_shape_enforced(self, client):
        r = client.put("/api/frames/0/boxes", json={"boxes": []})
        assert r.status_code == 400
        assert "version" in r.json()["detail"]
        assert client.put("/api/frames/9/boxes", json={"boxes": [], "version": 1}).status_code == 404


class TestImages:
    def test_serves_png(self, tmp_path, manifest_path):
        from PIL import Image

        img_path = tmp_path / "frames" / "00000.png"
        img_path.parent.mkdir()
        Image.new("RGB", (640, 480), (10, 20, 30)).save(img_path)
        client = TestClient(create_app(manifest_path))
        r = client.get("/api/images/0")
        assert r.status_code == 200
        assert r.headers["content-type"] == "image/png"
        assert r.content == img_path.read_bytes()

    def test_missing_image_404(self, client):
        r = client.get("/api/images/0")
        assert r.status_code == 404
        assert "image not found" in r.json()["detail"]


class TestAssets:
    def test_fallback_page_without_build(self, client):
        r = client.get("/")
        assert r.status_code == 200
        assert "not built" in r.text

    def test_built_client_served(self, tmp_path, manifest_path):
        assets = tmp_path / "dist"
        assets.mkdir()
        (assets / "index.html").write_text("<html><body>annotator shell</body></html>")
        (assets / "app.js").write_text("console.log('ready');")
        client = TestClient(create_app(manifest_path, assets_dir=assets))
        assert "annotator shell" in client.get("/").text
        r = client.get("/ui/app.js")
        assert r.status_code == 200
        assert "ready" in r.text
