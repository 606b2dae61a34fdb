"""Command-line front end: synth, train, detect, recognize, eval.

Every command is deterministic given its flags (and seed where one
applies); reports and manifests are byte-identical across repeated runs.
Errors go to stderr and yield a nonzero exit status.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import features, svm
from .config import detection_params, load_config
from .dataset import (
    BACKGROUNDS,
    SPEEDS,
    CorpusParams,
    generate_corpus,
    read_manifest,
)
from .detector import DetectionParams, detect, detection_record, format_record
from .evaluation import (
    DEFAULT_BUCKETS,
    evaluate_corpus,
    recognize_crop,
    write_report,
)
from .raster import read_image, write_image, write_ppm
from .segmenter import segment


def _params_from_args(args) -> DetectionParams:
    values = load_config(args.config) if args.config else None
    return detection_params(values)


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def cmd_synth(args) -> int:
    if args.config:
        try:
            load_config(args.config)  # synthesis takes no thresholds; validate anyway
        except (ValueError, OSError) as exc:
            return _fail(str(exc))
    params = CorpusParams(
        radius_min=args.radius_min,
        radius_max=args.radius_max,
        noise_sigma=args.noise,
        blur_sigma=args.blur,
        background=args.background,
        size=(args.height, args.width),
        image_format=args.format,
    )
    manifest = generate_corpus(args.n_per_class, params, args.seed, args.out)
    print(f"wrote {len(SPEEDS) * args.n_per_class} images, manifest {manifest}")
    return 0


def _training_glyphs(manifest_path, verbose=False):
    """Segment ground-truth sign crops into labeled glyphs for training."""
    annotations = read_manifest(manifest_path)
    base = os.path.dirname(os.path.abspath(manifest_path))
    present = {s.speed for a in annotations for s in a.signs}
    for speed in SPEEDS:
        if speed not in present:
            raise ValueError(f"corpus is missing class {speed}")
    X, y = [], []
    skipped = 0
    for ann in annotations:
        img = read_image(os.path.join(base, ann.image_path))
        for sign in ann.signs:
            x0, y0, x1, y1 = sign.bbox
            chars = segment(img[y0 : y1 + 1, x0 : x1 + 1])
            digits = [db.digit for db in sign.digits]
            if len(chars) != len(digits):
                skipped += 1
                if verbose:
                    print(
                        f"note: {ann.image_path}: segmented {len(chars)} glyphs "
                        f"for {len(digits)} digits, skipping",
                        file=sys.stderr,
                    )
                continue
            for ch, d in zip(chars, digits):
                X.append(features.extract(ch))
                y.append(d)
    if not X:
        raise ValueError("no trainable glyphs were segmented from the corpus")
    return np.asarray(X), np.asarray(y), skipped


def cmd_train(args) -> int:
    try:
        X, y, skipped = _training_glyphs(args.manifest, args.verbose)
    except (ValueError, FileNotFoundError, OSError) as exc:
        return _fail(str(exc))
    kernel = svm.Kernel(args.kernel, args.gamma if args.kernel == "rbf" else None)
    cfg = svm.TrainConfig(C=args.C, kernel=kernel, tolerance=args.tol,
                          max_passes=args.max_passes)
    model = svm.train_multiclass(X, y, cfg)
    svm.save_model(args.out, model)

    pred = np.array([svm.predict_label(model, x) for x in X])
    print(f"trained on {len(X)} glyphs ({skipped} signs skipped), "
          f"{len(model.machines)} machines -> {args.out}")
    for c in model.classes:
        mask = y == c
        acc = float((pred[mask] == c).mean())
        print(f"class {c}: train accuracy {acc:.4f} ({int(mask.sum())} samples)")
    overall = float((pred == y).mean())
    print(f"overall train accuracy {overall:.4f}")
    return 0


def _burn_bbox(img, bbox, color=(0, 255, 0)):
    x0, y0, x1, y1 = bbox
    img[y0, x0 : x1 + 1] = color
    img[y1, x0 : x1 + 1] = color
    img[y0 : y1 + 1, x0] = color
    img[y0 : y1 + 1, x1] = color


def _detect_images(args, model=None) -> int:
    try:
        params = _params_from_args(args)
    except (ValueError, OSError) as exc:
        return _fail(str(exc))
    status = 0
    for path in args.images:
        try:
            img = read_image(path)
        except (ValueError, OSError) as exc:
            status = _fail(f"{path}: {exc}")
            continue
        crops = detect(img, params)
        record = detection_record(path, crops)
        if model is not None:
            for crop, det in zip(crops, record["detections"]):
                det["speed"] = recognize_crop(crop, model)
            if args.dump_chars:
                os.makedirs(args.dump_chars, exist_ok=True)
                stem = os.path.splitext(os.path.basename(path))[0]
                for ci, crop in enumerate(crops):
                    for ch in segment(crop):
                        glyph_rgb = np.where(
                            ch.glyph[..., None], 0, 255
                        ).astype(np.uint8).repeat(3, axis=2)
                        write_ppm(
                            os.path.join(
                                args.dump_chars,
                                f"{stem}_s{ci}_c{ch.order_index}.ppm",
                            ),
                            glyph_rgb,
                        )
        print(format_record(record))
        if args.annotate_dir:
            os.makedirs(args.annotate_dir, exist_ok=True)
            burned = img.copy()
            for crop in crops:
                _burn_bbox(burned, crop.bbox)
            write_image(os.path.join(args.annotate_dir, os.path.basename(path)), burned)
    return status


def cmd_detect(args) -> int:
    return _detect_images(args, model=None)


def cmd_recognize(args) -> int:
    try:
        model = svm.load_model(args.model)
    except (ValueError, OSError) as exc:
        return _fail(f"{args.model}: {exc}")
    return _detect_images(args, model=model)


def _parse_buckets(text: str):
    buckets = []
    for part in text.split(","):
        lo, _, hi = part.partition("-")
        buckets.append((float(lo), float(hi)))
    return tuple(buckets)


def cmd_eval(args) -> int:
    try:
        model = svm.load_model(args.model) if args.model else None
        params = _params_from_args(args)
        buckets = _parse_buckets(args.buckets) if args.buckets else DEFAULT_BUCKETS
        report, records = evaluate_corpus(args.manifest, params, model, buckets)
    except (ValueError, OSError) as exc:
        return _fail(str(exc))
    print(report.to_text())
    if args.out:
        write_report(args.out, report, records)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speedsign",
        description="circular speed-limit sign detection and recognition",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic annotated corpus")
    p.add_argument("--n-per-class", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--blur", type=float, default=0.0)
    p.add_argument("--background", choices=BACKGROUNDS, default="plain")
    p.add_argument("--radius-min", type=float, default=40.0)
    p.add_argument("--radius-max", type=float, default=80.0)
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--height", type=int, default=256)
    p.add_argument("--format", choices=("png", "ppm"), default="png")
    p.add_argument("--config", default=None)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train the digit classifier on a corpus")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--kernel", choices=("linear", "rbf"), default="rbf")
    p.add_argument("--C", type=float, default=10.0)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--max-passes", type=int, default=20000)
    p.add_argument("--config", default=None)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_train)

    for name, func, needs_model in (("detect", cmd_detect, False),
                                    ("recognize", cmd_recognize, True)):
        p = sub.add_parser(name, help=f"{name} signs in images")
        p.add_argument("images", nargs="+")
        if needs_model:
            p.add_argument("--model", required=True)
            p.add_argument("--dump-chars", default=None,
                           help="directory for segmented-character PPM dumps")
        p.add_argument("--annotate-dir", default=None,
                       help="directory for copies with detection boxes burned in")
        p.add_argument("--config", default=None)
        p.add_argument("--verbose", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("eval", help="evaluate detection/recognition over a corpus")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--buckets", default=None,
                   help="radius buckets, e.g. 15-25,25-40,40-80")
    p.add_argument("--config", default=None)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
