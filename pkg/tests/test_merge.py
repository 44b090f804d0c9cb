"""Detection fusion: connected components over the overlap graph."""

import random

import pytest

from litterscan.detect import Detection
from litterscan.geometry import BoundingBox, iou, overlap_over_smaller, union_box
from litterscan.merge import MergeConfig, merge_detections


def det(x, y, w, h, class_id=1, score=1.0):
    return Detection(box=BoundingBox(x, y, w, h), class_id=class_id, score=score)


def random_set(rng, n=12, classes=(1, 2, 3), frame=200, max_side=60):
    out = []
    for _ in range(rng.randint(0, n)):
        w = rng.randint(1, max_side)
        h = rng.randint(1, max_side)
        out.append(
            Detection(
                box=BoundingBox(rng.randint(0, frame - w), rng.randint(0, frame - h), w, h),
                class_id=rng.choice(classes),
                score=rng.choice([0.25, 0.5, 0.75, 1.0]),
            )
        )
    return out


class TestMergeConfig:
    def test_defaults(self):
        cfg = MergeConfig()
        assert cfg.overlap_threshold == 0.6
        assert cfg.overlap_measure == "iou"

    @pytest.mark.parametrize("threshold", [0.0, -0.5, 1.01])
    def test_threshold_range(self, threshold):
        with pytest.raises(ValueError):
            MergeConfig(overlap_threshold=threshold)

    def test_unknown_measure(self):
        with pytest.raises(ValueError, match="overlap_measure"):
            MergeConfig(overlap_measure="dice")


class TestMergeBasics:
    def test_identical_pair_collapses_to_max_score(self):
        out = merge_detections([det(0, 0, 10, 10, score=0.4), det(0, 0, 10, 10, score=0.9)])
        assert out == [det(0, 0, 10, 10, score=0.9)]

    def test_different_classes_never_merge(self):
        a = det(0, 0, 10, 10, class_id=1)
        b = det(1, 0, 10, 10, class_id=2)  # IoU ~0.82
        assert iou(a.box, b.box) > 0.6
        out = merge_detections([a, b])
        assert len(out) == 2

    def test_transitive_chain_collapses(self):
        # A-B and B-C overlap above threshold, A-C far below
        a = det(0, 0, 40, 40, score=0.5)
        b = det(8, 0, 40, 40, score=0.7)
        c = det(16, 0, 40, 40, score=0.6)
        assert iou(a.box, b.box) > 0.6 and iou(b.box, c.box) > 0.6
        assert iou(a.box, c.box) < 0.6
        out = merge_detections([a, b, c])
        assert out == [det(0, 0, 56, 40, score=0.7)]

    def test_threshold_is_strict(self):
        # iou exactly 0.6: a 10x6 box nested in a 10x10 box
        a, b = det(0, 0, 10, 10), det(0, 0, 10, 6)
        assert iou(a.box, b.box) == 0.6
        assert len(merge_detections([a, b], MergeConfig(overlap_threshold=0.6))) == 2
        assert len(merge_detections([a, b], MergeConfig(overlap_threshold=0.59))) == 1

    def test_over_smaller_measure_reunifies_fragments(self):
        whole = det(0, 0, 100, 50, score=1.0)
        fragment = det(80, 0, 20, 50, score=1.0)
        assert overlap_over_smaller(whole.box, fragment.box) == 1.0
        assert iou(whole.box, fragment.box) < 0.6
        cfg = MergeConfig(overlap_measure="over_smaller")
        assert merge_detections([whole, fragment], cfg) == [whole]
        assert len(merge_detections([whole, fragment])) == 2

    def test_empty_input(self):
        assert merge_detections([]) == []

    def test_disjoint_inputs_pass_through_sorted(self):
        a, b = det(50, 0, 10, 10), det(0, 0, 10, 10)
        assert merge_detections([a, b]) == [b, a]


class TestMergeProperties:
    @pytest.mark.parametrize("measure", ["iou", "over_smaller"])
    def test_permutation_invariance(self, measure):
        rng = random.Random(42)
        cfg = MergeConfig(overlap_measure=measure)
        for _ in range(60):
            dets = random_set(rng)
            baseline = sorted(merge_detections(dets, cfg), key=lambda d: (d.class_id, d.box))
            for _ in range(6):
                shuffled = dets[:]
                rng.shuffle(shuffled)
                out = sorted(merge_detections(shuffled, cfg), key=lambda d: (d.class_id, d.box))
                assert out == baseline

    @pytest.mark.parametrize("measure", ["iou", "over_smaller"])
    def test_fixpoint_on_own_output(self, measure):
        rng = random.Random(7)
        cfg = MergeConfig(overlap_measure=measure)
        for _ in range(60):
            once = merge_detections(random_set(rng), cfg)
            assert merge_detections(once, cfg) == once

    def test_output_count_and_containment(self):
        rng = random.Random(3)
        for _ in range(60):
            dets = random_set(rng)
            out = merge_detections(dets)
            assert len(out) <= len(dets)
            for d in dets:
                assert any(
                    o.class_id == d.class_id and o.box.contains(d.box) for o in out
                )

    def test_class_purity_and_score_max(self):
        dets = [
            det(0, 0, 30, 30, class_id=2, score=0.3),
            det(2, 2, 30, 30, class_id=2, score=0.8),
            det(0, 0, 30, 30, class_id=3, score=0.1),
        ]
        out = merge_detections(dets)
        by_class = {d.class_id: d for d in out}
        assert by_class[2].score == 0.8
        assert by_class[2].box == union_box(dets[0].box, dets[1].box)
        assert by_class[3].score == 0.1
