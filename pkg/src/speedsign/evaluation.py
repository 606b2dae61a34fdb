"""Corpus evaluation: detection matching, recognition scoring, radius buckets.

A ground-truth sign counts as detected when some returned crop overlaps
its box with IoU >= 0.5 (greedy one-to-one matching, best IoU first).
Unmatched detections are false positives. Recognition is scored on
matched signs only: the digits segmented from the crop, classified and
concatenated, must equal the annotated speed.

Per-image records and the summary are emitted as JSON with fixed key
order; the summary is recomputable from the records alone.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .dataset import Annotation, read_manifest
from .detector import DetectionParams, SignCrop, detect
from .raster import read_image
from .segmenter import segment
from .svm import MulticlassModel, predict_label
from . import features

DEFAULT_BUCKETS = ((15.0, 25.0), (25.0, 40.0), (40.0, 80.0))
IOU_MATCH = 0.5


def iou(a, b) -> float:
    """Intersection over union of two inclusive (x0, y0, x1, y1) boxes."""
    ix0, iy0 = max(a[0], b[0]), max(a[1], b[1])
    ix1, iy1 = min(a[2], b[2]), min(a[3], b[3])
    if ix1 < ix0 or iy1 < iy0:
        return 0.0
    inter = (ix1 - ix0 + 1) * (iy1 - iy0 + 1)
    area_a = (a[2] - a[0] + 1) * (a[3] - a[1] + 1)
    area_b = (b[2] - b[0] + 1) * (b[3] - b[1] + 1)
    return inter / (area_a + area_b - inter)


def match_detections(gt_boxes, crops: list[SignCrop]):
    """Greedy one-to-one matching by descending IoU; pairs below 0.5 stay unmatched.

    Returns (gt_to_crop index map with -1 for misses, number of false positives).
    """
    pairs = []
    for gi, gbox in enumerate(gt_boxes):
        for ci, crop in enumerate(crops):
            v = iou(gbox, crop.bbox)
            if v >= IOU_MATCH:
                pairs.append((v, gi, ci))
    pairs.sort(key=lambda t: (-t[0], t[1], t[2]))
    gt_match = [-1] * len(gt_boxes)
    used = set()
    for v, gi, ci in pairs:
        if gt_match[gi] == -1 and ci not in used:
            gt_match[gi] = ci
            used.add(ci)
    return gt_match, len(crops) - len(used)


def recognize_crop(crop: SignCrop, model: MulticlassModel) -> int | None:
    """Predicted speed for a crop, or None when no digits segment out."""
    chars = segment(crop)
    if not chars:
        return None
    digits = [predict_label(model, features.extract(c)) for c in chars]
    return int("".join(str(d) for d in digits))


@dataclass
class EvalReport:
    n_images: int
    n_signs: int
    n_detected: int
    false_positives: int
    n_recognized: int
    detection_rate: float
    false_positives_per_image: float
    recognition_rate: float
    buckets: list[dict]

    def to_text(self) -> str:
        lines = [
            f"images:                {self.n_images}",
            f"signs:                 {self.n_signs}",
            f"detection_rate:        {self.detection_rate:.4f}",
            f"false_pos_per_image:   {self.false_positives_per_image:.4f}",
            f"recognition_rate:      {self.recognition_rate:.4f}",
            "radius buckets:",
        ]
        for b in self.buckets:
            lines.append(
                f"  [{b['lo']:g}, {b['hi']:g}): n={b['n']}"
                f" detection={b['detection_rate']:.4f}"
                f" recognition={b['recognition_rate']:.4f}"
            )
        return "\n".join(lines)

    def to_record(self) -> dict:
        return {
            "summary": {
                "n_images": self.n_images,
                "n_signs": self.n_signs,
                "n_detected": self.n_detected,
                "false_positives": self.false_positives,
                "n_recognized": self.n_recognized,
                "detection_rate": self.detection_rate,
                "false_positives_per_image": self.false_positives_per_image,
                "recognition_rate": self.recognition_rate,
                "buckets": self.buckets,
            }
        }


def evaluate_image(img, ann: Annotation, params: DetectionParams,
                   model: MulticlassModel | None) -> dict:
    """Per-image record: detections matched against the annotation."""
    crops = detect(img, params)
    gt_boxes = [s.bbox for s in ann.signs]
    gt_match, n_fp = match_detections(gt_boxes, crops)
    signs = []
    for sign, ci in zip(ann.signs, gt_match):
        detected = ci >= 0
        predicted = None
        if detected and model is not None:
            predicted = recognize_crop(crops[ci], model)
        signs.append(
            {
                "speed": sign.speed,
                "radius": sign.radius,
                "detected": detected,
                "predicted": predicted,
                "recognized": bool(detected and predicted == sign.speed),
            }
        )
    return {"path": ann.image_path, "false_positives": n_fp, "signs": signs}


def summarize(records: list[dict], buckets=DEFAULT_BUCKETS) -> EvalReport:
    """Aggregate per-image records into an EvalReport."""
    n_images = len(records)
    n_signs = n_detected = n_recognized = n_fp = 0
    bstats = [{"lo": lo, "hi": hi, "n": 0, "detected": 0, "recognized": 0} for lo, hi in buckets]
    for rec in records:
        n_fp += rec["false_positives"]
        for s in rec["signs"]:
            n_signs += 1
            n_detected += bool(s["detected"])
            n_recognized += bool(s["recognized"])
            for i, (lo, hi) in enumerate(buckets):
                last = i == len(buckets) - 1
                if lo <= s["radius"] < hi or (last and s["radius"] == hi):
                    bstats[i]["n"] += 1
                    bstats[i]["detected"] += bool(s["detected"])
                    bstats[i]["recognized"] += bool(s["recognized"])
                    break
    out_buckets = []
    for b in bstats:
        n = b["n"]
        out_buckets.append(
            {
                "lo": b["lo"],
                "hi": b["hi"],
                "n": n,
                "detection_rate": b["detected"] / n if n else 0.0,
                "recognition_rate": b["recognized"] / n if n else 0.0,
            }
        )
    return EvalReport(
        n_images=n_images,
        n_signs=n_signs,
        n_detected=n_detected,
        false_positives=n_fp,
        n_recognized=n_recognized,
        detection_rate=n_detected / n_signs if n_signs else 0.0,
        false_positives_per_image=n_fp / n_images if n_images else 0.0,
        recognition_rate=n_recognized / n_detected if n_detected else 0.0,
        buckets=out_buckets,
    )


def evaluate_corpus(manifest_path, params: DetectionParams,
                    model: MulticlassModel | None,
                    buckets=DEFAULT_BUCKETS) -> tuple[EvalReport, list[dict]]:
    """Evaluate every manifest entry in order; returns (report, records)."""
    annotations = read_manifest(manifest_path)
    if not annotations:
        raise ValueError(f"{manifest_path}: empty manifest")
    base = os.path.dirname(os.path.abspath(manifest_path))
    records = []
    for ann in annotations:
        img_path = os.path.join(base, ann.image_path)
        if not os.path.exists(img_path):
            raise FileNotFoundError(f"manifest entry has no image: {ann.image_path}")
        img = read_image(img_path)
        records.append(evaluate_image(img, ann, params, model))
    return summarize(records, buckets), records


def write_report(path, report: EvalReport, records: list[dict]) -> None:
    """Per-image JSON records, then one summary record, one per line."""
    with open(path, "w", encoding="ascii") as f:
        for rec in records:
            f.write(json.dumps(rec) + "\n")
        f.write(json.dumps(report.to_record()) + "\n")
