"""Canny edge detection on gray images.

Stages: Gaussian smoothing, Sobel gradients, non-maximum suppression along
the gradient direction quantized to 4 bins (0/45/90/135 degrees), then
double-threshold hysteresis where weak pixels survive iff they are
8-connected (transitively) to a strong pixel.

Conventions, shared with the test reference implementation:

* smoothing uses a sampled Gaussian kernel of radius ceil(3*sigma),
  normalized, applied separably with reflect padding;
* suppression keeps a pixel iff its magnitude is strictly greater than the
  neighbor in the +direction and >= the neighbor in the -direction (the
  asymmetry resolves two-pixel plateaus deterministically);
* the one-pixel image border is never an edge;
* with ``relative=True`` the thresholds are fractions of the maximum
  gradient magnitude of the image at hand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .raster import as_gray


@dataclass(frozen=True)
class CannyParams:
    sigma: float = 1.4
    low: float = 0.1
    high: float = 0.3
    relative: bool = True

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")
        if not (0 < self.low < self.high):
            raise ValueError("thresholds must satisfy 0 < low < high")


def gaussian_kernel(sigma: float) -> np.ndarray:
    radius = math.ceil(3.0 * sigma)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def _convolve1d(img: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    radius = len(kernel) // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (radius, radius)
    padded = np.pad(img, pad, mode="reflect")
    out = np.zeros_like(img)
    for t, kt in enumerate(kernel):
        if axis == 0:
            out += kt * padded[t : t + img.shape[0], :]
        else:
            out += kt * padded[:, t : t + img.shape[1]]
    return out


def gaussian_smooth(img: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian smoothing of a float image, reflect padding."""
    img = np.asarray(img, dtype=np.float64)
    k = gaussian_kernel(sigma)
    return _convolve1d(_convolve1d(img, k, 0), k, 1)


def sobel_gradients(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sobel gx (x = column, rightward) and gy (y = row, downward), reflect padded."""
    img = np.asarray(img, dtype=np.float64)
    p = np.pad(img, 1, mode="reflect")
    h, w = img.shape
    tl = p[0:h, 0:w]
    tc = p[0:h, 1 : w + 1]
    tr = p[0:h, 2 : w + 2]
    ml = p[1 : h + 1, 0:w]
    mr = p[1 : h + 1, 2 : w + 2]
    bl = p[2 : h + 2, 0:w]
    bc = p[2 : h + 2, 1 : w + 1]
    br = p[2 : h + 2, 2 : w + 2]
    gx = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl)
    gy = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr)
    return gx, gy


# offsets (dy, dx) of the +direction neighbor for each quantized bin
_DIR_OFFSETS = {0: (0, 1), 1: (1, 1), 2: (1, 0), 3: (1, -1)}


def quantize_direction(gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """Gradient direction quantized to bins 0..3 (0, 45, 90, 135 degrees mod 180).

    Ties at 22.5-degree boundaries round up to the higher bin.
    """
    theta = np.degrees(np.arctan2(gy, gx)) % 180.0
    return np.floor(theta / 45.0 + 0.5).astype(np.int64) % 4


def canny(img: np.ndarray, params: CannyParams = CannyParams()) -> np.ndarray:
    """Edge map of a gray image; raises ValueError for images smaller than 3x3."""
    img = as_gray(img)
    h, w = img.shape
    if h < 3 or w < 3:
        raise ValueError(f"canny needs an image of at least 3x3, got {h}x{w}")

    smoothed = gaussian_smooth(img, params.sigma)
    gx, gy = sobel_gradients(smoothed)
    mag = np.hypot(gx, gy)
    bins = quantize_direction(gx, gy)

    # non-maximum suppression via shifted comparisons on a padded magnitude
    mp = np.pad(mag, 1, mode="constant")
    keep = np.zeros((h, w), dtype=bool)
    for b, (dy, dx) in _DIR_OFFSETS.items():
        plus = mp[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]
        minus = mp[1 - dy : 1 - dy + h, 1 - dx : 1 - dx + w]
        keep |= (bins == b) & (mag > plus) & (mag >= minus)
    keep[0, :] = keep[-1, :] = False
    keep[:, 0] = keep[:, -1] = False

    mmax = mag.max()
    if params.relative:
        low, high = params.low * mmax, params.high * mmax
    else:
        low, high = params.low, params.high
    if mmax == 0.0:
        return np.zeros((h, w), dtype=bool)

    strong = keep & (mag >= high)
    weak = keep & (mag >= low)
    labels, n = ndimage.label(weak, structure=np.ones((3, 3), dtype=bool))
    if n == 0:
        return strong
    strong_labels = np.zeros(n + 1, dtype=bool)
    strong_labels[np.unique(labels[strong])] = True
    strong_labels[0] = False
    return strong_labels[labels]
