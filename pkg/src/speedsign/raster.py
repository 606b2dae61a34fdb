"""Image containers, color conversions and the red-pixel rule.

Images are plain numpy arrays with fixed conventions, row-major:

* RGB image:    ``(h, w, 3)`` uint8, channels in [0, 255]
* gray image:   ``(h, w)`` uint8
* binary image: ``(h, w)`` bool (True = foreground)

HSV uses hue normalized to [0, 1) (1.0 would be 360 degrees), saturation
and value in [0, 1]. Achromatic pixels get h = 0, s = 0.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

GRAY_WEIGHTS = (0.299, 0.587, 0.114)  # BT.601 luma


class HsvPixel(NamedTuple):
    h: float
    s: float
    v: float


@dataclass(frozen=True)
class RedThresholds:
    """Inclusive HSV bounds deciding whether a pixel counts as red.

    The defaults are the red-rim band used for sign verification:
    s >= 0.45, v >= 0.5 and 0.8 <= h <= 0.94. ``h_wrap_max`` optionally
    admits a second band of hues in [0, h_wrap_max] (the zero-adjacent
    reds some cameras produce); it is disabled (negative) by default.
    """

    h_min: float = 0.8
    h_max: float = 0.94
    s_min: float = 0.45
    v_min: float = 0.5
    h_wrap_max: float = -1.0


def as_rgb(img) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3 or img.dtype != np.uint8:
        raise ValueError(f"expected (h, w, 3) uint8 RGB image, got {img.shape} {img.dtype}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError("image must be at least 1x1")
    return img


def as_gray(img) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 2 or img.dtype != np.uint8:
        raise ValueError(f"expected (h, w) uint8 gray image, got {img.shape} {img.dtype}")
    return img


def as_binary(img) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 2 or img.dtype != np.bool_:
        raise ValueError(f"expected (h, w) bool binary image, got {img.shape} {img.dtype}")
    return img


def to_gray(img: np.ndarray, weights=GRAY_WEIGHTS) -> np.ndarray:
    """Convert an RGB image to gray: round(wr*R + wg*G + wb*B), clamped to [0, 255]."""
    img = as_rgb(img)
    wr, wg, wb = weights
    g = wr * img[..., 0].astype(np.float64) + wg * img[..., 1] + wb * img[..., 2]
    return np.clip(np.rint(g), 0, 255).astype(np.uint8)


def rgb_to_hsv_image(img: np.ndarray) -> np.ndarray:
    """Vectorized hexcone RGB -> HSV over an (h, w, 3) uint8 image.

    Returns an (h, w, 3) float64 array of (h, s, v). Hue is normalized to
    [0, 1); achromatic pixels (max == min) get h = 0 and s = 0.
    """
    rgb = as_rgb(img).astype(np.float64) / 255.0
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    mx = rgb.max(axis=-1)
    mn = rgb.min(axis=-1)
    delta = mx - mn

    v = mx
    s = np.where(mx > 0, delta / np.where(mx > 0, mx, 1.0), 0.0)

    chroma = np.where(delta > 0, delta, 1.0)  # avoid 0/0; masked out below
    h = np.zeros_like(mx)
    is_r = (mx == r) & (delta > 0)
    is_g = (mx == g) & (delta > 0) & ~is_r
    is_b = (delta > 0) & ~is_r & ~is_g
    h = np.where(is_r, ((g - b) / chroma) % 6.0, h)
    h = np.where(is_g, (b - r) / chroma + 2.0, h)
    h = np.where(is_b, (r - g) / chroma + 4.0, h)
    h = h / 6.0
    h = np.where(h >= 1.0, h - 1.0, h)
    return np.stack([h, s, v], axis=-1)


def rgb_to_hsv(rgb) -> HsvPixel:
    """Convert one (r, g, b) triple of [0, 255] channels to an HsvPixel."""
    px = np.asarray(rgb, dtype=np.uint8).reshape(1, 1, 3)
    h, s, v = rgb_to_hsv_image(px)[0, 0]
    return HsvPixel(float(h), float(s), float(v))


def hsv_to_rgb_image(hsv: np.ndarray) -> np.ndarray:
    """Standard hexcone inverse of :func:`rgb_to_hsv_image`; returns uint8 RGB."""
    hsv = np.asarray(hsv, dtype=np.float64)
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    k = h * 6.0
    i = np.floor(k).astype(np.int64) % 6
    f = k - np.floor(k)
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    # channel choice table indexed by sector
    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    rgb = np.stack([r, g, b], axis=-1)
    return np.clip(np.rint(rgb * 255.0), 0, 255).astype(np.uint8)


def hsv_to_rgb(h: float, s: float, v: float) -> tuple[int, int, int]:
    px = hsv_to_rgb_image(np.array([[[h, s, v]]]))
    return tuple(int(c) for c in px[0, 0])


def is_red(h, s, v, thresholds: RedThresholds = RedThresholds()):
    """The pointwise red rule on HSV components; all comparisons inclusive.

    Works on scalars or equally-shaped arrays.
    """
    t = thresholds
    in_band = (h >= t.h_min) & (h <= t.h_max)
    if t.h_wrap_max >= 0:
        in_band = in_band | (h <= t.h_wrap_max)
    return (s >= t.s_min) & (v >= t.v_min) & in_band


def red_mask(img: np.ndarray, thresholds: RedThresholds = RedThresholds()) -> np.ndarray:
    """Binary mask of pixels whose HSV falls in the red band."""
    hsv = rgb_to_hsv_image(img)
    return np.asarray(is_red(hsv[..., 0], hsv[..., 1], hsv[..., 2], thresholds), dtype=bool)


# ---------------------------------------------------------------------------
# image file I/O: binary PPM (P6) and PNG


def write_ppm(path, img: np.ndarray) -> None:
    """Write an RGB image as binary PPM (P6, maxval 255)."""
    img = as_rgb(img)
    h, w = img.shape[:2]
    with open(path, "wb") as f:
        f.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        f.write(img.tobytes())


def read_ppm(path) -> np.ndarray:
    """Read a binary PPM (P6) file written by :func:`write_ppm` or any
    standards-conforming producer (whitespace/comment tolerant header)."""
    with open(path, "rb") as f:
        data = f.read()

    pos = 0

    def next_token():
        nonlocal pos
        while pos < len(data):
            if data[pos : pos + 1].isspace():
                pos += 1
            elif data[pos : pos + 1] == b"#":
                while pos < len(data) and data[pos : pos + 1] != b"\n":
                    pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        return data[start:pos]

    magic = next_token()
    if magic != b"P6":
        raise ValueError(f"{path}: not a P6 PPM file")
    w, h, maxval = int(next_token()), int(next_token()), int(next_token())
    if maxval != 255:
        raise ValueError(f"{path}: unsupported maxval {maxval}")
    pos += 1  # single whitespace after maxval
    raw = data[pos : pos + w * h * 3]
    if len(raw) != w * h * 3:
        raise ValueError(f"{path}: truncated pixel data")
    return np.frombuffer(raw, dtype=np.uint8).reshape(h, w, 3).copy()


def write_png(path, img: np.ndarray) -> None:
    from PIL import Image

    Image.fromarray(as_rgb(img), mode="RGB").save(path, format="PNG")


def read_png(path) -> np.ndarray:
    from PIL import Image

    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()


def read_image(path) -> np.ndarray:
    """Read a PPM or PNG image by extension."""
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".ppm":
        return read_ppm(path)
    if ext == ".png":
        return read_png(path)
    raise ValueError(f"unsupported image format: {path}")


def write_image(path, img: np.ndarray) -> None:
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".ppm":
        write_ppm(path, img)
    elif ext == ".png":
        write_png(path, img)
    else:
        raise ValueError(f"unsupported image format: {path}")
