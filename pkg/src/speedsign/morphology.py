"""Binary mathematical morphology: erosion, dilation, opening/closing, hole filling.

Boundary convention: everything outside the image is background. Foreground
is 8-connected; hole filling therefore treats background as 4-connected
(the standard complementary pairing).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .raster import as_binary

CROSS_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


@dataclass(frozen=True)
class StructuringElement:
    """Odd-sized boolean mask with its origin at the center cell."""

    mask: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.ndim != 2 or mask.shape[0] % 2 == 0 or mask.shape[1] % 2 == 0:
            raise ValueError("structuring element must be 2-D with odd dimensions")
        if not mask[mask.shape[0] // 2, mask.shape[1] // 2]:
            raise ValueError("structuring element origin (center cell) must be set")
        object.__setattr__(self, "mask", mask)

    @property
    def offsets(self) -> np.ndarray:
        """(k, 2) array of (dy, dx) offsets of set cells relative to the origin."""
        cy, cx = self.mask.shape[0] // 2, self.mask.shape[1] // 2
        ys, xs = np.nonzero(self.mask)
        return np.stack([ys - cy, xs - cx], axis=1)

    def reflected(self) -> "StructuringElement":
        return StructuringElement(self.mask[::-1, ::-1])


def box(size: int = 3) -> StructuringElement:
    """All-ones square structuring element."""
    return StructuringElement(np.ones((size, size), dtype=bool))


def erode(img: np.ndarray, se: StructuringElement) -> np.ndarray:
    """Pixel stays set iff the SE centered there fits entirely in foreground."""
    img = as_binary(img)
    h, w = img.shape
    ry, rx = se.mask.shape[0] // 2, se.mask.shape[1] // 2
    padded = np.zeros((h + 2 * ry, w + 2 * rx), dtype=bool)
    padded[ry : ry + h, rx : rx + w] = img
    out = np.ones_like(img)
    for dy, dx in se.offsets:
        out &= padded[ry + dy : ry + dy + h, rx + dx : rx + dx + w]
    return out


def dilate(img: np.ndarray, se: StructuringElement) -> np.ndarray:
    """Pixel becomes set iff the reflected SE centered there hits any foreground."""
    img = as_binary(img)
    h, w = img.shape
    ry, rx = se.mask.shape[0] // 2, se.mask.shape[1] // 2
    padded = np.zeros((h + 2 * ry, w + 2 * rx), dtype=bool)
    padded[ry : ry + h, rx : rx + w] = img
    out = np.zeros_like(img)
    for dy, dx in se.reflected().offsets:
        out |= padded[ry + dy : ry + dy + h, rx + dx : rx + dx + w]
    return out


def opening(img: np.ndarray, se: StructuringElement) -> np.ndarray:
    return dilate(erode(img, se), se)


def closing(img: np.ndarray, se: StructuringElement) -> np.ndarray:
    return erode(dilate(img, se), se)


def fill_holes(img: np.ndarray) -> np.ndarray:
    """Fill background regions that cannot reach the image border 4-connectedly."""
    img = as_binary(img)
    bg_labels, n = ndimage.label(~img, structure=CROSS_4)
    if n == 0:
        return img.copy()
    border = np.zeros(n + 1, dtype=bool)
    for sl in (bg_labels[0, :], bg_labels[-1, :], bg_labels[:, 0], bg_labels[:, -1]):
        border[np.unique(sl)] = True
    border[0] = True
    return img | ~border[bg_labels]
