"""Circular speed-limit sign detection and digit recognition on still images.

Pipeline: grayscale -> Canny edges -> binary morphology -> hole fill ->
8-connected labeling -> roundness band + red-rim verification -> digit
segmentation -> block angle/run-length features -> one-against-one SVM.
"""

from .raster import (
    GRAY_WEIGHTS,
    HsvPixel,
    RedThresholds,
    hsv_to_rgb,
    read_image,
    red_mask,
    rgb_to_hsv,
    to_gray,
    write_image,
)
from .morphology import StructuringElement, box, closing, dilate, erode, fill_holes, opening
from .edges import CannyParams, canny, gaussian_smooth
from .regions import LabelMap, Region, circularity, label, region_props
from .detector import DetectionParams, SignCrop, check_red_rim, detect
from .segmenter import CharacterImage, normalize_glyph, otsu_threshold, segment
from .features import angle_features, contour, extract, transit_features
from .svm import (
    BinaryModel,
    Kernel,
    MulticlassModel,
    TrainConfig,
    decide,
    load_model,
    predict,
    predict_label,
    save_model,
    train_binary,
    train_multiclass,
)
from .dataset import (
    SPEEDS,
    Annotation,
    CorpusParams,
    SignSpec,
    digit_glyph,
    generate_corpus,
    read_manifest,
    render_scene,
)
from .evaluation import EvalReport, evaluate_corpus, iou, recognize_crop, summarize

__version__ = "0.1.0"
