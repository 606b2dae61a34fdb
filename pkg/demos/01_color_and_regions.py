"""Color analysis and region measurement on simple shapes.

Walks through the bottom layer of the pipeline: grayscale conversion, the
HSV red rule, connected-component labeling and the roundness metric that
separates disks from everything else.
"""

import numpy as np

from speedsign import raster
from speedsign.regions import circularity, label, region_props

# --- grayscale and HSV -----------------------------------------------------

pixel = (209, 31, 170)  # the generator's default rim color
h, s, v = raster.rgb_to_hsv(pixel)
print(f"rim color {pixel} -> h={h:.3f} s={s:.3f} v={v:.3f}")
print(f"  inside the red band (0.8<=h<=0.94, s>=0.45, v>=0.5)? "
      f"{bool(raster.is_red(h, s, v))}")

for probe in [(255, 0, 0), (128, 128, 128), (30, 200, 60)]:
    ph, ps, pv = raster.rgb_to_hsv(probe)
    print(f"probe {probe}: h={ph:.3f} -> red? {bool(raster.is_red(ph, ps, pv))}")

# --- a scene of shapes, measured -------------------------------------------

canvas = np.zeros((120, 260), dtype=bool)
yy, xx = np.mgrid[0:120, 0:260]

canvas[(yy - 60) ** 2 + (xx - 60) ** 2 <= 40**2] = True  # disk
canvas[20:100, 130:210] = True  # square
canvas[55:65, 220:255] = True  # bar

lm = label(canvas)
print(f"\n{lm.count} regions found:")
for region in region_props(lm):
    print(f"  label {region.label}: area={region.area:5d} "
          f"perimeter={region.perimeter:7.1f} metric={region.metric:.3f}")

print("\nonly the disk clears the 0.9 candidate threshold;")
print(f"an ideal continuous square would sit at pi/4 = {np.pi/4:.4f},")
print(f"an ideal disk at exactly {circularity(int(np.pi * 1e6), 2 * np.pi * 1e3):.4f}")
