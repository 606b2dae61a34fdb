"""Block features and the one-against-one SVM digit classifier.

Extracts the 36-value vector (18 block angles + 18 run-length ratios) for
font digits at several scales, trains the pairwise machines, and shows
the voting behavior on held-out renderings.
"""

import numpy as np

from speedsign.dataset import digit_glyph
from speedsign.features import contour, extract
from speedsign.segmenter import normalize_glyph
from speedsign.svm import Kernel, TrainConfig, predict, train_multiclass

DIGITS = (0, 1, 2, 4, 6, 8)  # the digits that occur in speed limits


def rendering(d, scale):
    return normalize_glyph(np.kron(digit_glyph(d), np.ones((scale, scale), dtype=bool)))


# --- look at one vector -----------------------------------------------------

glyph = rendering(6, 4)
vec = extract(glyph)
print("digit 6, contour pixels:", int(contour(glyph).sum()))
print("block angles (degrees), 6 rows x 3 cols of blocks:")
for row in vec[:18].reshape(6, 3):
    print("   " + "  ".join(f"{v:5.1f}" for v in row))
print("run-length ratios:")
for row in vec[18:].reshape(6, 3):
    print("   " + "  ".join(f"{v:5.2f}" for v in row))

# --- train on scales 2..5, test on scale 6 ----------------------------------

X, y = [], []
for d in DIGITS:
    for s in (2, 3, 4, 5):
        X.append(extract(rendering(d, s)))
        y.append(d)
model = train_multiclass(np.array(X), np.array(y),
                         TrainConfig(C=10.0, kernel=Kernel("rbf")))
print(f"\ntrained {len(model.machines)} pairwise machines "
      f"for {len(model.classes)} classes {model.classes}")

print("\nheld-out scale-6 renderings:")
correct = 0
for d in DIGITS:
    pred, votes = predict(model, extract(rendering(d, 6)))
    correct += pred == d
    tally = ", ".join(f"{c}:{n}" for c, n in votes.items() if n)
    print(f"  true {d} -> predicted {pred}   votes {{{tally}}}")
print(f"held-out accuracy: {correct}/{len(DIGITS)}")
