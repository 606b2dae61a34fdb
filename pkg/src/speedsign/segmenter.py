"""Character segmentation inside a detected sign crop.

Red rim pixels are cleared to white, the crop is grayscaled and Otsu
thresholded, and the dark side is taken as foreground so the digits light
up. Components touching the crop border are rim/background residue and
are dropped; of the rest, a component survives when its area is at least
0.35x the largest one and its height at least half the tallest candidate
(keeps the narrow digit '1', drops specks; a fixed fraction of the crop
height would reject every digit of a three-digit speed, whose glyph scale
is bound by width). Survivors are ordered left to right and each is
resampled to exactly 60x30 by nearest neighbor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import GLYPH_SHAPE
from .raster import RedThresholds, as_binary, red_mask, to_gray
from .regions import label, region_props

AREA_KEEP_FRACTION = 0.35
HEIGHT_KEEP_FRACTION = 0.5  # of the tallest border-free component


@dataclass(frozen=True)
class CharacterImage:
    glyph: np.ndarray  # (60, 30) bool
    order_index: int

    def __post_init__(self):
        g = as_binary(self.glyph)
        if g.shape != GLYPH_SHAPE:
            raise ValueError(f"character glyph must be {GLYPH_SHAPE}, got {g.shape}")
        if not g.any():
            raise ValueError("character glyph must contain foreground")


def otsu_threshold(gray: np.ndarray) -> int:
    """Otsu's threshold t; the dark class is gray <= t.

    Deterministic: among equal-variance optima the smallest t wins.
    """
    hist = np.bincount(np.asarray(gray, dtype=np.uint8).ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    omega = np.cumsum(hist) / total
    mu = np.cumsum(hist * np.arange(256)) / total
    mu_total = mu[-1]
    denom = omega * (1.0 - omega)
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma_b = np.where(denom > 0, (mu_total * omega - mu) ** 2 / denom, 0.0)
    return int(np.argmax(sigma_b))


def normalize_glyph(region_pixels: np.ndarray) -> np.ndarray:
    """Tight bounding box of the foreground, resampled to 60x30 nearest-neighbor."""
    mask = as_binary(region_pixels)
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        raise ValueError("cannot normalize an empty glyph")
    tight = mask[ys.min() : ys.max() + 1, xs.min() : xs.max() + 1]
    th, tw = GLYPH_SHAPE
    h, w = tight.shape
    rows = (np.arange(th) * h) // th
    cols = (np.arange(tw) * w) // tw
    out = tight[np.ix_(rows, cols)]
    if not out.any():
        raise ValueError("glyph lost all foreground during resampling")
    return out


def _digit_mask(crop: np.ndarray, red: RedThresholds) -> np.ndarray:
    work = crop.copy()
    work[red_mask(crop, red)] = 255
    gray = to_gray(work)
    t = otsu_threshold(gray)
    return gray <= t


def segment(crop, red: RedThresholds = RedThresholds()) -> list[CharacterImage]:
    """Extract the digit glyphs of a sign crop, left to right.

    ``crop`` is a SignCrop or a plain RGB array. Returns [] when nothing
    survives the keep rule (e.g. a blank sign face).
    """
    img = getattr(crop, "image", crop)
    fg = _digit_mask(img, red)
    lm = label(fg)
    if lm.count == 0:
        return []
    h, w = fg.shape
    regions = []
    for r in region_props(lm):
        x0, y0, x1, y1 = r.bbox
        if x0 == 0 or y0 == 0 or x1 == w - 1 or y1 == h - 1:
            continue  # touches the crop border: rim residue or background
        regions.append(r)
    if not regions:
        return []
    max_area = max(r.area for r in regions)
    max_height = max(r.bbox[3] - r.bbox[1] + 1 for r in regions)
    kept = [
        r
        for r in regions
        if r.area >= AREA_KEEP_FRACTION * max_area
        and (r.bbox[3] - r.bbox[1] + 1) >= HEIGHT_KEEP_FRACTION * max_height
    ]
    kept.sort(key=lambda r: r.bbox[0])
    chars = []
    for idx, r in enumerate(kept):
        x0, y0, x1, y1 = r.bbox
        mask = lm.labels[y0 : y1 + 1, x0 : x1 + 1] == r.label
        chars.append(CharacterImage(normalize_glyph(mask), idx))
    return chars
