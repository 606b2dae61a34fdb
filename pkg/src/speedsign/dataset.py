"""Synthetic speed-sign scene generator with exact ground-truth annotations.

A scene is a background (plain, gradient, or clutter) with one rendered
sign: a white disk, a red rim of thickness 0.15*radius, and the speed
digits drawn in black from the built-in 7x5 bitmap font, integer-scaled to
fit the white core. Optional small rotation, Gaussian blur and Gaussian
pixel noise. Rendering is deterministic given (spec, background, seed).

Corpus layout written by :func:`generate_corpus`: one image file per
scene plus ``manifest.jsonl`` with one JSON record per image, in
class-then-index order::

    {"path": <relative image path>, "speed": <int>, "radius": <float>,
     "sign_bbox": [min_x, min_y, max_x, max_y],
     "digits": [[digit, [min_x, min_y, max_x, max_y]], ...]}

Bounding boxes are inclusive pixel coordinates.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .edges import gaussian_smooth
from .raster import hsv_to_rgb, write_image

SPEEDS = (20, 40, 60, 80, 100)
BACKGROUNDS = ("plain", "gradient", "clutter")
RIM_THICKNESS = 0.15  # fraction of the sign radius

PLAIN_BG = (185, 185, 185)
DEFAULT_RIM_HSV = (0.87, 0.85, 0.82)  # mid of the red detection band

# 7x5 digit bitmaps. '1' is deliberately narrow (2 columns). '0' encloses
# a background hole.
_FONT_ROWS = {
    0: (".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    1: ("..#..", ".##..", "..#..", "..#..", "..#..", "..#..", "..#.."),
    2: (".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"),
    3: (".###.", "#...#", "....#", "..##.", "....#", "#...#", ".###."),
    4: ("...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."),
    5: ("#####", "#....", "####.", "....#", "....#", "#...#", ".###."),
    6: (".###.", "#....", "#....", "####.", "#...#", "#...#", ".###."),
    7: ("#####", "....#", "...#.", "..#..", "..#..", ".#...", ".#..."),
    8: (".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."),
    9: (".###.", "#...#", "#...#", ".####", "....#", "....#", ".###."),
}
FONT_SHAPE = (7, 5)


def digit_glyph(d: int) -> np.ndarray:
    """The 7x5 bitmap of digit d as a bool array."""
    if d not in _FONT_ROWS:
        raise ValueError(f"digit must be in 0..9, got {d}")
    return np.array([[ch == "#" for ch in row] for row in _FONT_ROWS[d]], dtype=bool)


@dataclass(frozen=True)
class SignSpec:
    speed: int
    center: tuple[float, float]  # (x, y) in pixels
    radius: float
    rim_color: tuple[int, int, int] | None = None  # None: default red-band color
    rotation: float = 0.0  # degrees, |rotation| <= 10
    noise_sigma: float = 0.0
    blur_sigma: float = 0.0

    def __post_init__(self):
        if self.speed not in SPEEDS:
            raise ValueError(f"speed must be one of {SPEEDS}, got {self.speed}")
        if self.radius <= 0:
            raise ValueError("radius must be > 0")
        if abs(self.rotation) > 10:
            raise ValueError("rotation is limited to +-10 degrees")
        if self.noise_sigma < 0 or self.blur_sigma < 0:
            raise ValueError("noise/blur sigmas must be >= 0")

    def resolved_rim_color(self) -> tuple[int, int, int]:
        return self.rim_color if self.rim_color is not None else hsv_to_rgb(*DEFAULT_RIM_HSV)


@dataclass(frozen=True)
class DigitBox:
    digit: int
    bbox: tuple[int, int, int, int]


@dataclass(frozen=True)
class SignRecord:
    speed: int
    bbox: tuple[int, int, int, int]
    radius: float
    digits: tuple[DigitBox, ...]


@dataclass
class Annotation:
    image_path: str | None
    signs: list[SignRecord]


def _random_nonred_color(rng) -> np.ndarray:
    """A color whose hue stays clear of the red detection band."""
    h = rng.uniform(0.02, 0.72)
    s = rng.uniform(0.15, 0.6)
    v = rng.uniform(0.35, 0.9)
    return np.array(hsv_to_rgb(h, s, v), dtype=np.float64)


def _paint_background(canvas: np.ndarray, background: str, rng, keep_out=None) -> None:
    """Fill the canvas; clutter shapes stay clear of the ``keep_out`` box.

    Distractor shapes deliberately do not cross the sign: clutter exists to
    make false positives observable, while a shape cutting the sign contour
    breaks its edge ring (a failure mode of edge-based detection as such,
    not something this corpus is meant to measure).
    """
    h, w = canvas.shape[:2]
    if background == "plain":
        canvas[:] = PLAIN_BG
        return
    if background == "gradient":
        c0, c1 = _random_nonred_color(rng), _random_nonred_color(rng)
        t = np.linspace(0.0, 1.0, w)[None, :, None]
        canvas[:] = c0[None, None, :] * (1 - t) + c1[None, None, :] * t
        return
    if background == "clutter":
        canvas[:] = PLAIN_BG
        n_shapes = int(rng.integers(4, 10))
        yy, xx = np.mgrid[0:h, 0:w]
        for _ in range(n_shapes):
            for _attempt in range(20):
                color = _random_nonred_color(rng)
                cx = rng.uniform(0, w)
                cy = rng.uniform(0, h)
                sx = rng.uniform(0.03, 0.14) * w
                sy = rng.uniform(0.03, 0.14) * h
                is_rect = rng.uniform() < 0.5
                if keep_out is not None:
                    kx0, ky0, kx1, ky1 = keep_out
                    if cx + sx >= kx0 and cx - sx <= kx1 and cy + sy >= ky0 and cy - sy <= ky1:
                        continue
                if is_rect:
                    mask = (np.abs(xx - cx) <= sx) & (np.abs(yy - cy) <= sy)
                else:
                    mask = ((xx - cx) / sx) ** 2 + ((yy - cy) / sy) ** 2 <= 1.0
                canvas[mask] = color
                break
        return
    raise ValueError(f"unknown background {background!r}")


def _digit_layout(speed: int, core_radius: float):
    """Integer glyph scale and block size (w, h) for the digits of a speed."""
    n = len(str(speed))
    units_w = 6 * n - 1  # glyph widths plus 1-unit gaps
    units_h = FONT_SHAPE[0]
    half_diag = math.hypot(units_w / 2.0, units_h / 2.0)
    scale = int(0.9 * core_radius / half_diag)
    if scale < 1:
        raise ValueError(
            f"radius too small to render digits for speed {speed} "
            f"(core radius {core_radius:.1f}px)"
        )
    return scale, units_w * scale, units_h * scale


def _bbox_of(mask: np.ndarray) -> tuple[int, int, int, int]:
    ys, xs = np.nonzero(mask)
    return (int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max()))


def render_scene(spec: SignSpec, background: str = "plain", seed: int = 0,
                 size: tuple[int, int] = (256, 256)) -> tuple[np.ndarray, Annotation]:
    """Render one scene; returns (RGB image, annotation).

    ``size`` is (height, width). Raises ValueError when the sign does not
    fit fully inside the image or is too small to carry its digits.
    """
    h, w = size
    cx, cy = spec.center
    r = spec.radius
    if cx - r < 0 or cx + r > w or cy - r < 0 or cy + r > h:
        raise ValueError("sign must lie fully inside the image bounds")

    rng = np.random.default_rng(seed)
    canvas = np.empty((h, w, 3), dtype=np.float64)
    keep_out = (cx - r - 6, cy - r - 6, cx + r + 6, cy + r + 6)
    _paint_background(canvas, background, rng, keep_out)

    yy, xx = np.mgrid[0:h, 0:w]
    px = xx + 0.5
    py = yy + 0.5
    dist = np.hypot(px - cx, py - cy)
    disk = dist <= r
    core_r = (1.0 - RIM_THICKNESS) * r
    rim = disk & (dist > core_r)
    core = disk & ~rim

    canvas[rim] = np.asarray(spec.resolved_rim_color(), dtype=np.float64)
    canvas[core] = 255.0

    # digits: sample the upright digit block through the inverse rotation
    text = [int(ch) for ch in str(spec.speed)]
    scale, bw, bh = _digit_layout(spec.speed, core_r)
    theta = math.radians(spec.rotation)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    dx = px - cx
    dy = py - cy
    u = cos_t * dx + sin_t * dy + cx  # rotate by -theta around the center
    v = -sin_t * dx + cos_t * dy + cy
    lx = u - (cx - bw / 2.0)
    ly = v - (cy - bh / 2.0)
    inside = core & (lx >= 0) & (lx < bw) & (ly >= 0) & (ly < bh)
    gx = np.floor(np.where(inside, lx, 0.0) / scale).astype(np.int64)
    gy = np.floor(np.where(inside, ly, 0.0) / scale).astype(np.int64)
    digit_idx = gx // 6
    glyph_col = gx % 6

    digit_boxes = []
    for k, d in enumerate(text):
        glyph = digit_glyph(d)
        cell = inside & (digit_idx == k) & (glyph_col < FONT_SHAPE[1])
        hit = np.zeros((h, w), dtype=bool)
        sel = np.nonzero(cell)
        hit[sel] = glyph[gy[sel], glyph_col[sel]]
        if not hit.any():
            raise ValueError(f"digit {d} rendered no pixels (radius too small)")
        canvas[hit] = 0.0
        digit_boxes.append(DigitBox(d, _bbox_of(hit)))

    if spec.blur_sigma > 0:
        for c in range(3):
            canvas[..., c] = gaussian_smooth(canvas[..., c], spec.blur_sigma)
    if spec.noise_sigma > 0:
        canvas += rng.normal(0.0, spec.noise_sigma, canvas.shape)

    img = np.clip(np.rint(canvas), 0, 255).astype(np.uint8)
    sign = SignRecord(spec.speed, _bbox_of(disk), float(r), tuple(digit_boxes))
    return img, Annotation(None, [sign])


@dataclass(frozen=True)
class CorpusParams:
    radius_min: float = 40.0
    radius_max: float = 80.0
    noise_sigma: float = 0.0
    blur_sigma: float = 0.0
    background: str = "plain"
    size: tuple[int, int] = (256, 256)
    image_format: str = "png"

    def __post_init__(self):
        if not (0 < self.radius_min <= self.radius_max):
            raise ValueError("need 0 < radius_min <= radius_max")
        if self.background not in BACKGROUNDS:
            raise ValueError(f"background must be one of {BACKGROUNDS}")
        if self.image_format not in ("png", "ppm"):
            raise ValueError("image_format must be png or ppm")


def annotation_to_record(ann: Annotation) -> dict:
    sign = ann.signs[0]
    return {
        "path": ann.image_path,
        "speed": sign.speed,
        "radius": sign.radius,
        "sign_bbox": list(sign.bbox),
        "digits": [[db.digit, list(db.bbox)] for db in sign.digits],
    }


def record_to_annotation(rec: dict) -> Annotation:
    digits = tuple(DigitBox(int(d), tuple(int(v) for v in bb)) for d, bb in rec["digits"])
    sign = SignRecord(
        int(rec["speed"]),
        tuple(int(v) for v in rec["sign_bbox"]),
        float(rec["radius"]),
        digits,
    )
    return Annotation(rec["path"], [sign])


def write_manifest(path, annotations) -> None:
    with open(path, "w", encoding="ascii") as f:
        for ann in annotations:
            f.write(json.dumps(annotation_to_record(ann)) + "\n")


def read_manifest(path) -> list[Annotation]:
    out = []
    with open(path, "r", encoding="ascii") as f:
        for line in f:
            line = line.strip()
            if line:
                out.append(record_to_annotation(json.loads(line)))
    return out


def generate_corpus(n_per_class: int, params: CorpusParams, seed: int, out_dir) -> str:
    """Render a class-balanced corpus under out_dir; returns the manifest path.

    Fully reproducible: the same (n_per_class, params, seed) produce the
    same images and manifest bytes.
    """
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    os.makedirs(out_dir, exist_ok=True)
    h, w = params.size
    margin = params.radius_max + 8
    if 2 * margin >= min(h, w):
        raise ValueError("image size too small for radius_max")

    rng = np.random.default_rng(seed)
    annotations = []
    for speed in SPEEDS:
        for i in range(n_per_class):
            radius = float(rng.uniform(params.radius_min, params.radius_max))
            m = radius + 8
            cx = float(rng.uniform(m, w - m))
            cy = float(rng.uniform(m, h - m))
            scene_seed = int(rng.integers(0, 2**31 - 1))
            spec = SignSpec(
                speed=speed,
                center=(cx, cy),
                radius=radius,
                noise_sigma=params.noise_sigma,
                blur_sigma=params.blur_sigma,
            )
            img, ann = render_scene(spec, params.background, scene_seed, params.size)
            name = f"{speed:03d}_{i:04d}.{params.image_format}"
            write_image(os.path.join(out_dir, name), img)
            ann.image_path = name
            annotations.append(ann)

    manifest = os.path.join(out_dir, "manifest.jsonl")
    write_manifest(manifest, annotations)
    return manifest
