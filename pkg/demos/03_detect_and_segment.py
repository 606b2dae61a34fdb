"""Sign detection and character segmentation on a cluttered scene.

The detector must pick the sign out of non-red clutter shapes (some of
them circular); segmentation then isolates the digits and normalizes each
to the 60x30 glyph the feature extractor expects.
"""

import os

import numpy as np

from speedsign.dataset import SignSpec, render_scene
from speedsign.detector import detect
from speedsign.raster import write_ppm
from speedsign.segmenter import segment

OUT = "demo_output"
os.makedirs(OUT, exist_ok=True)

spec = SignSpec(speed=100, center=(170.0, 110.0), radius=64.0, noise_sigma=4.0)
img, ann = render_scene(spec, "clutter", seed=5, size=(280, 320))
write_ppm(os.path.join(OUT, "cluttered_scene.ppm"), img)

crops = detect(img)
print(f"ground truth bbox: {ann.signs[0].bbox}")
print(f"{len(crops)} detection(s):")
for crop in crops:
    print(f"  bbox={crop.bbox} metric={crop.metric:.3f} "
          f"red_fraction={crop.red_fraction:.3f}")
if not crops:
    # edge-based detection needs an intact contour: an object cutting the
    # sign outline merges their edge components and no circular candidate
    # survives. Busy backgrounds are the known weak spot of the approach.
    raise SystemExit("sign contour was corrupted by clutter; try another seed")

annotated = img.copy()
for crop in crops:
    x0, y0, x1, y1 = crop.bbox
    annotated[y0, x0:x1 + 1] = annotated[y1, x0:x1 + 1] = (0, 255, 0)
    annotated[y0:y1 + 1, x0] = annotated[y0:y1 + 1, x1] = (0, 255, 0)
write_ppm(os.path.join(OUT, "cluttered_annotated.ppm"), annotated)

chars = segment(crops[0])
print(f"\nsegmented {len(chars)} characters, left to right:")
for ch in chars:
    # quick console rendering, one text row per 6 glyph rows
    print(f"  character {ch.order_index}:")
    for r in range(0, 60, 6):
        row = "".join("#" if ch.glyph[r, c] else "." for c in range(0, 30, 2))
        print(f"    {row}")
    rgb = np.where(ch.glyph[..., None], 0, 255).astype(np.uint8).repeat(3, axis=2)
    write_ppm(os.path.join(OUT, f"char_{ch.order_index}.ppm"), rgb)

print(f"\nimages written to {OUT}/")
