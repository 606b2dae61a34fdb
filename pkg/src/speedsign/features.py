"""Block features of normalized 60x30 digit glyphs.

The glyph contour is split into 18 non-overlapping 10x10 blocks (6 block
rows x 3 block columns, raster order). Each block yields two numbers:

* angle feature: mean angle, in degrees, of its contour pixels seen from
  the block's bottom-left corner, measured from the horizontal; pixel
  centers sit at half-integer offsets so values stay inside (0, 90);
* transit feature: (number of maximal foreground runs across the block's
  10 rows) / (same across its 10 columns).

Blocks without any contour pixel contribute exactly 0 to both halves. The
full vector is the 18 angle values followed by the 18 transit values.
"""

from __future__ import annotations

import numpy as np

from .raster import as_binary

GLYPH_SHAPE = (60, 30)
BLOCK = 10
N_BLOCKS = 18
VECTOR_LEN = 2 * N_BLOCKS


def _check_glyph(img: np.ndarray) -> np.ndarray:
    img = as_binary(img)
    if img.shape != GLYPH_SHAPE:
        raise ValueError(f"expected a {GLYPH_SHAPE} glyph, got {img.shape}")
    return img


def contour(glyph: np.ndarray) -> np.ndarray:
    """Foreground pixels with at least one 4-neighbor background (border counts)."""
    g = _check_glyph(glyph)
    p = np.pad(g, 1, mode="constant")
    h, w = g.shape
    interior = (
        p[0:h, 1 : w + 1]
        & p[2 : h + 2, 1 : w + 1]
        & p[1 : h + 1, 0:w]
        & p[1 : h + 1, 2 : w + 2]
    )
    return g & ~interior


def _blocks(img: np.ndarray):
    for br in range(GLYPH_SHAPE[0] // BLOCK):
        for bc in range(GLYPH_SHAPE[1] // BLOCK):
            yield img[br * BLOCK : (br + 1) * BLOCK, bc * BLOCK : (bc + 1) * BLOCK]


def angle_features(contour_img: np.ndarray) -> np.ndarray:
    """Per-block mean pixel angle from the block's bottom-left corner, degrees."""
    img = _check_glyph(contour_img)
    out = np.zeros(N_BLOCKS)
    for b, blk in enumerate(_blocks(img)):
        rows, cols = np.nonzero(blk)
        if rows.size == 0:
            continue
        dx = cols + 0.5
        dy = BLOCK - rows - 0.5
        out[b] = np.degrees(np.arctan2(dy, dx)).mean()
    return out


def _count_runs(lines: np.ndarray) -> int:
    """Total number of maximal True runs over the rows of a 2-D bool array."""
    padded = np.zeros((lines.shape[0], lines.shape[1] + 1), dtype=bool)
    padded[:, 1:] = lines
    starts = lines & ~padded[:, :-1]
    return int(starts.sum())


def transit_features(contour_img: np.ndarray) -> np.ndarray:
    """Per-block ratio of horizontal to vertical run counts."""
    img = _check_glyph(contour_img)
    out = np.zeros(N_BLOCKS)
    for b, blk in enumerate(_blocks(img)):
        h = _count_runs(blk)
        if h == 0:
            continue
        v = _count_runs(blk.T)
        out[b] = h / v
    return out


def extract(glyph) -> np.ndarray:
    """36-feature vector of a glyph: 18 angle values then 18 transit values.

    Accepts either a 60x30 bool array or anything with a ``.glyph`` array
    attribute (a segmented character).
    """
    img = getattr(glyph, "glyph", glyph)
    c = contour(img)
    return np.concatenate([angle_features(c), transit_features(c)])


# ---------------------------------------------------------------------------
# training-set file format: a comment header, then one CSV line per sample
# with the 36 feature values followed by the integer class label.

_HEADER = "# angle_00..angle_17,transit_00..transit_17,label"


def save_features(path, vectors: np.ndarray, labels) -> None:
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[1] != VECTOR_LEN:
        raise ValueError(f"expected (n, {VECTOR_LEN}) feature matrix")
    if vectors.shape[0] != len(labels):
        raise ValueError("one label per feature vector required")
    with open(path, "w", encoding="ascii") as f:
        f.write(_HEADER + "\n")
        for vec, lab in zip(vectors, labels):
            f.write(",".join(repr(float(v)) for v in vec) + f",{int(lab)}\n")


def load_features(path) -> tuple[np.ndarray, np.ndarray]:
    vectors, labels = [], []
    with open(path, "r", encoding="ascii") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != VECTOR_LEN + 1:
                raise ValueError(f"{path}: malformed feature line")
            vectors.append([float(p) for p in parts[:-1]])
            labels.append(int(parts[-1]))
    return np.asarray(vectors, dtype=np.float64), np.asarray(labels, dtype=np.int64)
