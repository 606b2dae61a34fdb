"""Sign detection: edge map, morphology, hole fill, labeling, shape + color filter.

The stages run per image: grayscale -> Canny -> closing of the edge map
(a 3x3 dilate-then-erode pass that repairs small hysteresis gaps so rings
fill; an opening here would erase the one-pixel-wide Canny contours
outright) -> hole fill -> 8-connected labeling -> candidate filter by
area and roundness band -> red-rim verification on the crop.

Candidates surviving all filters are returned as crops of the original
color image, largest first. When candidate boxes overlap, only the one
with roundness closest to 1 is kept.

The red-rim test runs on the candidate's own crop first. When that
fails, it is retried on the crop grown by 20% of its inscribed radius:
a weak outer boundary (sign rim against a matching background) leaves
only the rim/core ring closed, and the recovered component is then the
white core, whose red ring sits just outside the tight box. A crop
passing only the grown test is returned with the grown box, so its
stored red_fraction stays reproducible from the crop alone.

Detection report records are JSON lines, one per image, with this exact
key order::

    {"path": ..., "detections": [{"bbox": [x0, y0, x1, y1],
                                  "metric": ..., "red_fraction": ...}, ...]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .edges import CannyParams, canny
from .morphology import box, closing, fill_holes
from .raster import GRAY_WEIGHTS, RedThresholds, as_rgb, red_mask, to_gray
from .regions import label, region_props


@dataclass(frozen=True)
class DetectionParams:
    canny: CannyParams = field(default_factory=CannyParams)
    se_size: int = 3
    metric_low: float = 0.9
    metric_high: float = 1.0
    red_ratio_min: float = 0.3
    min_area: int = 400
    red: RedThresholds = field(default_factory=RedThresholds)
    gray_weights: tuple[float, float, float] = GRAY_WEIGHTS

    def __post_init__(self):
        if not (0 < self.metric_low <= self.metric_high):
            raise ValueError("need 0 < metric_low <= metric_high")
        if not (0 < self.red_ratio_min <= 1):
            raise ValueError("red_ratio_min must be in (0, 1]")
        if self.min_area < 1:
            raise ValueError("min_area must be >= 1")
        if self.se_size < 1 or self.se_size % 2 == 0:
            raise ValueError("se_size must be odd and >= 1")


@dataclass(frozen=True)
class SignCrop:
    image: np.ndarray  # RGB sub-image of the source
    bbox: tuple[int, int, int, int]  # source coordinates, inclusive
    metric: float
    red_fraction: float
    area: int


# rim band of the inscribed circle checked for red pixels
RIM_BAND = (0.6, 1.0)


def check_red_rim(crop: np.ndarray, params: DetectionParams = DetectionParams()):
    """Red fraction inside the rim annulus of a crop.

    The annulus spans 0.6..1.0 of the inscribed-circle radius around the
    crop center. Returns (passes, red_fraction).
    """
    crop = as_rgb(crop)
    h, w = crop.shape[:2]
    radius = min(h, w) / 2.0
    yy, xx = np.mgrid[0:h, 0:w]
    dist = np.hypot(xx + 0.5 - w / 2.0, yy + 0.5 - h / 2.0)
    band = (dist >= RIM_BAND[0] * radius) & (dist <= RIM_BAND[1] * radius)
    if not band.any():
        return False, 0.0
    frac = float(red_mask(crop, params.red)[band].mean())
    return frac >= params.red_ratio_min, frac


def _intersects(a, b) -> bool:
    return not (a[2] < b[0] or b[2] < a[0] or a[3] < b[1] or b[3] < a[1])


RIM_RETRY_GROWTH = 0.2  # of the crop's inscribed radius


def _grow_bbox(bbox, img_shape):
    x0, y0, x1, y1 = bbox
    margin = int(round(RIM_RETRY_GROWTH * (min(x1 - x0, y1 - y0) + 1) / 2.0))
    h, w = img_shape[:2]
    return (max(0, x0 - margin), max(0, y0 - margin),
            min(w - 1, x1 + margin), min(h - 1, y1 + margin))


def detect(img: np.ndarray, params: DetectionParams = DetectionParams()) -> list[SignCrop]:
    """All sign candidates of an image that pass shape and color tests."""
    img = as_rgb(img)
    gray = to_gray(img, params.gray_weights)
    edge = canny(gray, params.canny)
    if params.se_size > 1:
        edge = closing(edge, box(params.se_size))
    filled = fill_holes(edge)
    lm = label(filled)

    crops = []
    for region in region_props(lm):
        if region.area < params.min_area:
            continue
        if not (params.metric_low <= region.metric <= params.metric_high):
            continue
        x0, y0, x1, y1 = region.bbox
        sub = img[y0 : y1 + 1, x0 : x1 + 1]
        passes, frac = check_red_rim(sub, params)
        bbox = region.bbox
        if not passes:
            bbox = _grow_bbox(region.bbox, img.shape)
            gx0, gy0, gx1, gy1 = bbox
            sub = img[gy0 : gy1 + 1, gx0 : gx1 + 1]
            passes, frac = check_red_rim(sub, params)
        if not passes:
            continue
        crops.append(SignCrop(sub.copy(), bbox, region.metric, frac, region.area))

    # overlapping candidates: keep the one with roundness closest to 1
    kept: list[SignCrop] = []
    for crop in sorted(crops, key=lambda c: (abs(c.metric - 1.0), -c.area)):
        if not any(_intersects(crop.bbox, other.bbox) for other in kept):
            kept.append(crop)
    kept.sort(key=lambda c: -c.area)
    return kept


def detection_record(path: str, crops: list[SignCrop]) -> dict:
    return {
        "path": str(path),
        "detections": [
            {
                "bbox": list(c.bbox),
                "metric": c.metric,
                "red_fraction": c.red_fraction,
            }
            for c in crops
        ],
    }


def format_record(record: dict) -> str:
    """One report line; key order is fixed so identical runs emit identical bytes."""
    return json.dumps(record)
