import json

import numpy as np
import pytest

from speedsign.dataset import CorpusParams, SignSpec, digit_glyph, generate_corpus, render_scene
from speedsign.detector import DetectionParams, detect
from speedsign.evaluation import (
    EvalReport,
    evaluate_corpus,
    evaluate_image,
    iou,
    match_detections,
    recognize_crop,
    summarize,
    write_report,
)
from speedsign.features import extract
from speedsign.segmenter import normalize_glyph
from speedsign.svm import train_multiclass


def font_model():
    X, y = [], []
    for d in (0, 1, 2, 4, 6, 8):
        for s in (2, 3, 4, 5, 6):
            X.append(extract(normalize_glyph(np.kron(digit_glyph(d), np.ones((s, s), bool)))))
            y.append(d)
    return train_multiclass(np.array(X), np.array(y))


MODEL = font_model()


class TestIoU:
    def test_identical_boxes(self):
        assert iou((0, 0, 9, 9), (0, 0, 9, 9)) == 1.0

    def test_disjoint_boxes(self):
        assert iou((0, 0, 4, 4), (10, 10, 12, 12)) == 0.0

    def test_half_overlap(self):
        # 10x10 boxes sharing a 5x10 strip
        v = iou((0, 0, 9, 9), (5, 0, 14, 9))
        assert v == pytest.approx(50 / 150)


class TestMatching:
    class Box:
        def __init__(self, bbox):
            self.bbox = bbox

    def test_one_to_one_matching(self):
        gt = [(0, 0, 9, 9), (20, 20, 29, 29)]
        crops = [self.Box((21, 20, 30, 29)), self.Box((0, 1, 9, 10))]
        match, fp = match_detections(gt, crops)
        assert match == [1, 0]
        assert fp == 0

    def test_false_positive_counted(self):
        gt = [(0, 0, 9, 9)]
        crops = [self.Box((0, 0, 9, 9)), self.Box((40, 40, 49, 49))]
        match, fp = match_detections(gt, crops)
        assert match == [0] and fp == 1

    def test_below_threshold_is_miss(self):
        gt = [(0, 0, 9, 9)]
        crops = [self.Box((8, 8, 17, 17))]
        match, fp = match_detections(gt, crops)
        assert match == [-1] and fp == 1


class TestRecognize:
    def test_recognizes_rendered_sign(self):
        spec = SignSpec(speed=100, center=(128.0, 128.0), radius=60.0)
        img, _ = render_scene(spec, "plain", seed=2)
        crops = detect(img)
        assert crops
        assert recognize_crop(crops[0], MODEL) == 100


class TestSummarize:
    def make_records(self):
        return [
            {
                "path": "a.png",
                "false_positives": 1,
                "signs": [
                    {"speed": 60, "radius": 30.0, "detected": True,
                     "predicted": 60, "recognized": True}
                ],
            },
            {
                "path": "b.png",
                "false_positives": 0,
                "signs": [
                    {"speed": 80, "radius": 50.0, "detected": True,
                     "predicted": 20, "recognized": False},
                    {"speed": 20, "radius": 18.0, "detected": False,
                     "predicted": None, "recognized": False},
                ],
            },
        ]

    def test_rates(self):
        report = summarize(self.make_records())
        assert report.n_images == 2
        assert report.n_signs == 3
        assert report.detection_rate == pytest.approx(2 / 3)
        assert report.false_positives_per_image == pytest.approx(0.5)
        assert report.recognition_rate == pytest.approx(1 / 2)

    def test_buckets_partition_radii(self):
        report = summarize(self.make_records())
        ns = [b["n"] for b in report.buckets]
        assert ns == [1, 1, 1]
        assert report.buckets[0]["detection_rate"] == 0.0
        assert report.buckets[1]["detection_rate"] == 1.0

    def test_summary_recomputable_from_records(self):
        records = self.make_records()
        a = summarize(records)
        b = summarize(json.loads(json.dumps(records)))
        assert a == b


class TestEndToEnd:
    def test_corpus_eval_and_report_file(self, tmp_path):
        params = CorpusParams(size=(220, 220), radius_min=45, radius_max=70)
        manifest = generate_corpus(1, params, seed=12, out_dir=tmp_path / "c")
        report, records = evaluate_corpus(manifest, DetectionParams(), MODEL)
        assert report.n_images == 5
        assert report.detection_rate == 1.0
        assert report.recognition_rate == 1.0
        assert report.false_positives_per_image == 0.0

        out = tmp_path / "report.jsonl"
        write_report(out, report, records)
        lines = out.read_text().strip().split("\n")
        assert len(lines) == 6
        parsed = [json.loads(line) for line in lines]
        resummarized = summarize(parsed[:-1])
        assert resummarized.to_record() == parsed[-1]

        # independent recomputation, straight arithmetic over the records
        signs = [s for rec in parsed[:-1] for s in rec["signs"]]
        summary = parsed[-1]["summary"]
        assert summary["n_images"] == len(parsed) - 1
        assert summary["n_signs"] == len(signs)
        assert summary["detection_rate"] == sum(s["detected"] for s in signs) / len(signs)
        assert summary["false_positives_per_image"] == (
            sum(rec["false_positives"] for rec in parsed[:-1]) / (len(parsed) - 1)
        )
        assert summary["recognition_rate"] == (
            sum(s["recognized"] for s in signs) / sum(s["detected"] for s in signs)
        )

    def test_empty_manifest_rejected(self, tmp_path):
        empty = tmp_path / "manifest.jsonl"
        empty.write_text("")
        with pytest.raises(ValueError):
            evaluate_corpus(empty, DetectionParams(), None)

    def test_missing_image_named(self, tmp_path):
        manifest = tmp_path / "manifest.jsonl"
        manifest.write_text(
            json.dumps(
                {"path": "ghost.png", "speed": 20, "radius": 40.0,
                 "sign_bbox": [0, 0, 9, 9], "digits": [[2, [0, 0, 1, 1]], [0, [2, 0, 3, 1]]]}
            )
            + "\n"
        )
        with pytest.raises(FileNotFoundError, match="ghost.png"):
            evaluate_corpus(manifest, DetectionParams(), None)
